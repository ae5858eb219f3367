#pragma once

#include <span>

#include "coopfarm/core_model.hpp"
#include "oracles.hpp"

namespace support {

// Copies library inputs into the oracle's plain structs.
inline oracle::Game to_game(std::span<const coopfarm::Farm> farms, const coopfarm::CostVector& c,
                            const coopfarm::PayoffParams& p) {
  oracle::Game g;
  for (const auto& f : farms) g.players.push_back({f.device_count, f.quality, f.local_accuracy});
  g.c_o = c.membership;
  g.c_p = c.penalty;
  g.c_m = c.upload_comm;
  g.c_m2 = c.download_comm;
  g.c_s = c.storage;
  g.c_local = c.local_compute;
  g.benefit = p.benefit_coefficient;
  g.a_min = p.accuracy_model.a_min;
  g.a_max = p.accuracy_model.a_max;
  g.v0 = p.accuracy_model.volume_scale;
  g.penalty_in_coop = p.penalty_in_coop_cost;
  return g;
}

}  // namespace support
