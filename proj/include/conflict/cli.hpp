#pragma once

#include "conflict/scene.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace conflict {

/// Exit codes: 0 success or PASS, 1 verdict FAIL, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Two planes x3 = +-1 against two points (+-1, 0, 0): sheets tangent at the origin.
Scene demo_scene();

}  // namespace conflict
