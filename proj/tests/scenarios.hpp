// Small forward setups built from the named profiles.
#pragma once

#include "micropolar/direct_solver.hpp"
#include "micropolar/profiles.hpp"

namespace testing {

struct SetupOptions {
  int n = 16;
  int steps = 20;
  double final_time = 0.1;
  micropolar::DensityProfile density{};
  micropolar::VelocityProfile velocity{};
  micropolar::MicrorotationProfile microrotation{};
  micropolar::MShapeProfile m{};
  micropolar::QShapeProfile q{};
};

inline micropolar::ForwardSetup make_setup(const SetupOptions& o = {}) {
  using namespace micropolar;
  const Grid g(o.n, o.n, 1.0, 1.0);
  InitialData init{make_density(o.density, g), make_velocity(o.velocity, g),
                   make_microrotation(o.microrotation, g)};
  return ForwardSetup{g,
                      PhysicalParams{},
                      std::move(init),
                      make_shapes(o.m, o.q, g),
                      o.final_time,
                      o.steps,
                      Tolerances{}};
}

inline micropolar::SourcePair harmonic(const micropolar::ForwardSetup& s) {
  return micropolar::make_sources(micropolar::SourceProfile{}, s.times());
}

inline micropolar::SourcePair zero_sources(const micropolar::ForwardSetup& s) {
  return micropolar::SourcePair::constant(s.times(), 0.0, 0.0);
}

}  // namespace testing
