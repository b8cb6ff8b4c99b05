#pragma once

#include <string>
#include <vector>

namespace czx {

struct SelftestCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::string module;
  std::vector<SelftestCase> cases;
  bool passed() const;
};

// Module names accepted by run_selftest.
std::vector<std::string> selftest_modules();

// Runs the quick structural examples of one module (identities that hold by
// construction, such as constants having no Haar fluctuation). Unknown names
// throw ParameterError.
SelftestReport run_selftest(const std::string& module);

}  // namespace czx
