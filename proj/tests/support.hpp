#pragma once
// Shared fixtures for the test binaries.

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <random>
#include <string>
#include <vector>

#include "afp/classifier.hpp"
#include "afp/domain.hpp"
#include "afp/planner.hpp"
#include "afp/scenario.hpp"

namespace afp::testing {

struct RandomDomainSpec {
  std::size_t max_predicates = 12;
  std::size_t max_actions = 10;
  std::size_t max_hazards = 4;
  std::size_t max_missions = 3;
};

struct RandomCase {
  Domain domain;
  Environment env;
  std::vector<GroundMission> missions;  // starts are concrete states
};

/// Small random domain with one or two visibility predicates, a few empowering
/// actions, hazard rules, and missions with concrete start states. Always
/// passes validate_domain.
RandomCase random_case(std::uint64_t seed, RandomDomainSpec spec = {});

/// A state drawn uniformly over the domain's valuations.
State random_state(const Domain& d, std::mt19937_64& rng);

/// Closed-world state with exactly the named predicates true.
State make_state(const Domain& d, std::initializer_list<std::string_view> true_predicates);

/// Actions by name; throws on unknown names.
Plan plan_of(const Domain& d, std::initializer_list<std::string_view> names);
Plan plan_of(const Domain& d, const std::vector<std::string>& names);

std::string fixture_path(const std::string& name);
Scenario load_fixture(const std::string& name);
std::string read_file(const std::string& path);

}  // namespace afp::testing
