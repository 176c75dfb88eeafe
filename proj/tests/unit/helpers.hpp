#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "gridtree/dataset.hpp"
#include "gridtree/partynet.hpp"

namespace testutil {

using gridtree::net::PartyId;

inline std::vector<PartyId> ring(std::size_t k) {
  std::vector<PartyId> out;
  for (std::size_t j = 1; j <= k; ++j) out.push_back({1, static_cast<std::uint32_t>(j)});
  return out;
}

inline gridtree::data::Relation weather() {
  return gridtree::data::load_relation(GRIDTREE_DATA_DIR "/weather.csv", "day", "play");
}

inline gridtree::data::Relation parse(const std::string& csv, const std::string& id, const std::string& cls) {
  std::istringstream in(csv);
  return gridtree::data::parse_relation_csv(in, id, cls);
}

}  // namespace testutil
