#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "propkit/finitep.hpp"

namespace propkit {

// A list of labeled subsets of a finite carrier, each one a coset of a
// declared subgroup.  Self-contained: carries bitsets and labels only, so
// reports replay without the originating table.
struct DefinableFamily {
  uint32_t carrier = 0;
  std::string descriptor;
  std::vector<ElemSet> subgroups;
  std::vector<std::string> subgroup_labels;
  struct Coset {
    std::string label;
    uint32_t subgroup = 0;  // index into subgroups
    ElemSet elems;
  };
  std::vector<Coset> sets;
  std::vector<std::string> point_labels;
};

struct FamilySelector {
  enum class Kind { AllSubgroupsUpToIndex, WreathBaseCoordinates, Explicit };
  Kind kind = Kind::AllSubgroupsUpToIndex;
  // AllSubgroupsUpToIndex: every coset of every proper subgroup of index
  // <= max_index (the whole group itself is excluded).
  uint64_t max_index = 2;
  // Explicit: labeled sets with their declared subgroups, validated.
  struct Item {
    std::string label;
    ElemSet elems;
    ElemSet subgroup;
  };
  std::vector<Item> items;

  static FamilySelector up_to_index(uint64_t k) {
    FamilySelector s;
    s.kind = Kind::AllSubgroupsUpToIndex;
    s.max_index = k;
    return s;
  }
  static FamilySelector wreath_base() {
    FamilySelector s;
    s.kind = Kind::WreathBaseCoordinates;
    return s;
  }
};

DefinableFamily coset_family(const FiniteGroupTable& F,
                             const FamilySelector& sel,
                             const EnumOptions& opts = {});

// Shattering search result.  For independence mode the witness items are
// the chosen set labels and each pattern maps to a realizing point; for vc
// mode the items are the chosen point labels and each trace maps to a
// realizing set.  search_capped records a truncated search (cap reached or
// node budget exhausted), i.e. the dimension is a verified lower bound.
struct ShatterReport {
  std::string mode;
  uint32_t dimension = 0;
  bool search_capped = false;
  std::vector<std::string> witness_items;
  std::vector<std::pair<uint64_t, std::string>> witness_patterns;
};

ShatterReport independence_dimension(const DefinableFamily& fam, uint32_t cap,
                                     uint64_t node_budget = 1000000);
ShatterReport vc_dimension(const DefinableFamily& fam, uint32_t cap,
                           uint64_t node_budget = 1000000);

// Row/column array of cosets over the base coordinates of a wreath or
// cyclic-product table: rows use disjoint coordinate blocks J_i, row
// subgroups S_i force every block coordinate to zero, and column cosets
// S_i g_j (g_j a coordinate indicator) are pairwise disjoint within a row
// while every choice of one column per row has an explicit common element.
struct TP2Array {
  uint32_t rows = 0, cols = 0;
  std::vector<std::vector<uint32_t>> col_sets;  // J_i: coordinate indices
  std::vector<ElemSet> row_subgroups;
  std::vector<std::vector<ElemSet>> cosets;        // [row][col]
  std::vector<std::vector<std::string>> coset_labels;
  bool rows_disjoint = false;
  bool paths_consistent = false;
  struct PathWitness {
    std::vector<uint32_t> path;  // column choice per row
    uint16_t element = 0;
    bool ok = false;
  };
  std::vector<PathWitness> path_witnesses;
};

TP2Array tp2_array(const FiniteGroupTable& F, uint32_t rows, uint32_t cols);

// Smallest w such that some w of the given subgroups already meet in the
// intersection of the whole list.  Exhaustive over subfamilies by
// increasing size; optional out-parameter receives one witness subfamily.
uint32_t baldwin_saxl_width(const std::vector<ElemSet>& subgroups,
                            std::vector<uint32_t>* witness = nullptr,
                            uint64_t eval_budget = uint64_t{1} << 22);

}  // namespace propkit
