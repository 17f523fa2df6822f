#pragma once

#include <cmath>
#include <cstdint>

#include "agequeue/scenario.hpp"

namespace agequeue::testing {

/// Exponential(1) lifetimes cut at age 40, where S is below 1e-12.
inline SurvivalModel unit_exponential() { return SurvivalModel::exponential(1.0, 40.0); }

/// Exponential lifetimes and age pyramid with constant fertility beta.
/// r beta = 1 makes the population stationary.
inline ScenarioConfig stationary_toy(double beta = 2.0, double h = 0.05) {
  ScenarioConfig c;
  c.female_survival = unit_exponential();
  c.male_survival = unit_exponential();
  c.fertility = FertilitySchedule::constant(beta);
  c.r = 0.5;
  c.N = 1000;
  c.female_initial = InitialDensity::exponential(1.0, 1.0);
  c.male_initial = InitialDensity::exponential(1.0, 1.0);
  c.t_max = 5.0;
  c.h = h;
  c.seed = 20240601;
  c.replications = 200;
  c.observation = {1.0, 5.0, {1.0, 2.0, 3.0, 5.0}};
  return c;
}

/// No births; N females with ages on a triangle over [0, 1]. Every one of
/// them survives to t with probability e^{-t}, independently.
inline ScenarioConfig binomial_scenario(double h = 0.25) {
  ScenarioConfig c;
  c.female_survival = unit_exponential();
  c.male_survival = unit_exponential();
  c.fertility = FertilitySchedule::constant(0.0);
  c.r = 0.5;
  c.N = 1000;
  c.female_initial = InitialDensity::table({{0.0, 0.0}, {0.5, 2.0}, {1.0, 0.0}});
  c.male_initial = InitialDensity::zero();
  c.t_max = 1.0;
  c.h = h;
  c.seed = 20240601;
  c.replications = 200;
  c.observation = {1.0, 3.0, {1.0}};
  return c;
}

/// Closed form of the stationary female bin mean N int_a^b e^{-x} dx.
inline double exp_mass(double a, double b) { return std::exp(-a) - std::exp(-b); }

}  // namespace agequeue::testing
