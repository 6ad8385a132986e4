#ifndef FLG_CLI_HPP
#define FLG_CLI_HPP

#include <iostream>
#include <string>
#include <vector>

namespace flg::cli {

// Dispatches one CLI invocation. Exit codes: 0 success, 1 verified-claim
// failure (an audited inequality or generator oracle did not hold), 2 usage
// or input error. Parsing problems never return 1.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flg::cli

#endif
