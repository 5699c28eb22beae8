// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tfev/model/params.hpp"
#include "tfev/model/sequence.hpp"

namespace tfev::model {

/// Softmax attention weights of every layer and head, each L x L.
struct AttentionRecord {
  std::size_t n_layers = 0;
  std::size_t n_heads = 0;
  std::vector<Mat> maps;  // index layer * n_heads + head

  const Mat& at(std::size_t layer, std::size_t head) const { return maps[layer * n_heads + head]; }
  bool empty() const { return maps.empty(); }
};

/// Map of one head, or the head average when head is empty.
Mat attention_map(const AttentionRecord& record, std::size_t layer, std::optional<std::size_t> head);

/// Role x role aggregation of an L x L map over the sequence segments.
///   block_mean(a, b): mean of every map entry with query in a and key in b
///                     (masked future entries count as zero).
///   mass(a, b):       mean over queries in a of their summed weight on keys in b.
///                     Rows sum to 1, and mass(a, b) = block_mean(a, b) * |b|.
struct RegionMatrix {
  std::vector<Role> roles;
  Mat block_mean;
  Mat mass;
};

RegionMatrix region_matrix(const Mat& map, const std::vector<Segment>& segments);

struct AttentionExport {
  std::size_t layer = 0;
  std::optional<std::size_t> head;
  Mat map;
  RegionMatrix regions;
};

/// Runs the model on `seq` and aggregates the selected layer and head.
/// Throws DataError for an out-of-range layer or head.
AttentionExport export_attention(const TokenSequence& seq, const Params& params, std::size_t layer,
                                 std::optional<std::size_t> head);

/// Full map as CSV: header "query,k0,k1,...", then one row per query.
void write_attention_map_csv(const Mat& map, std::ostream& out);

/// Region matrices as CSV: "stat,query_role,<role>,<role>,..." for both statistics.
void write_region_csv(const RegionMatrix& regions, std::ostream& out);

}  // namespace tfev::model
