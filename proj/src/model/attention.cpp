// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/model/attention.hpp"

#include <cstdio>
#include <ostream>

#include "tfev/error.hpp"
#include "tfev/model/transformer.hpp"

namespace tfev::model {

Mat attention_map(const AttentionRecord& record, std::size_t layer, std::optional<std::size_t> head) {
  if (layer >= record.n_layers) {
    throw DataError("attention: layer " + std::to_string(layer) + " out of range (model has " +
                    std::to_string(record.n_layers) + ")");
  }
  if (head) {
    if (*head >= record.n_heads) {
      throw DataError("attention: head " + std::to_string(*head) + " out of range (model has " +
                      std::to_string(record.n_heads) + ")");
    }
    return record.at(layer, *head);
  }
  Mat mean = record.at(layer, 0);
  for (std::size_t h = 1; h < record.n_heads; ++h) mean += record.at(layer, h);
  return mean / static_cast<double>(record.n_heads);
}

RegionMatrix region_matrix(const Mat& map, const std::vector<Segment>& segments) {
  RegionMatrix r;
  const auto n = static_cast<Eigen::Index>(segments.size());
  r.block_mean = Mat::Zero(n, n);
  r.mass = Mat::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto& qa = segments[static_cast<std::size_t>(a)];
    r.roles.push_back(qa.role);
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& kb = segments[static_cast<std::size_t>(b)];
      if (qa.size() == 0 || kb.size() == 0) continue;
      const double sum = map.block(static_cast<Eigen::Index>(qa.begin), static_cast<Eigen::Index>(kb.begin),
                                   static_cast<Eigen::Index>(qa.size()), static_cast<Eigen::Index>(kb.size()))
                             .sum();
      r.block_mean(a, b) = sum / static_cast<double>(qa.size() * kb.size());
      r.mass(a, b) = sum / static_cast<double>(qa.size());
    }
  }
  return r;
}

AttentionExport export_attention(const TokenSequence& seq, const Params& params, std::size_t layer,
                                 std::optional<std::size_t> head) {
  if (layer >= params.config.n_layers) {
    throw DataError("attention: layer " + std::to_string(layer) + " out of range (model has " +
                    std::to_string(params.config.n_layers) + ")");
  }
  if (head && *head >= params.config.n_heads) {
    throw DataError("attention: head " + std::to_string(*head) + " out of range (model has " +
                    std::to_string(params.config.n_heads) + ")");
  }
  const auto fwd = forward(seq, params, true);
  AttentionExport out;
  out.layer = layer;
  out.head = head;
  out.map = attention_map(fwd.attention, layer, head);
  out.regions = region_matrix(out.map, seq.segments);
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out << buf;
}

}  // namespace

void write_attention_map_csv(const Mat& map, std::ostream& out) {
  out << "query";
  for (Eigen::Index j = 0; j < map.cols(); ++j) out << ",k" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < map.cols(); ++j) {
      out << ',';
      put(out, map(i, j));
    }
    out << '\n';
  }
}

void write_region_csv(const RegionMatrix& regions, std::ostream& out) {
  out << "stat,query_role";
  for (Role r : regions.roles) out << ',' << to_string(r);
  out << '\n';
  for (const auto& [name, m] : {std::pair<const char*, const Mat*>{"block_mean", &regions.block_mean},
                                {"mass", &regions.mass}}) {
    for (std::size_t a = 0; a < regions.roles.size(); ++a) {
      out << name << ',' << to_string(regions.roles[a]);
      for (std::size_t b = 0; b < regions.roles.size(); ++b) {
        out << ',';
        put(out, (*m)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
      out << '\n';
    }
  }
}

}  // namespace tfev::model
