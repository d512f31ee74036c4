#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ifslab/contfrac.hpp"
#include "ifslab/families.hpp"
#include "ifslab/ifs.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab::cli {

// `similarity1d(lambda=0.5, digits=[-1,1])`, `phit(t=golden)`,
// `affine(d=2, maps=[[a11,a12,a21,a22,t1,t2];[...]])`
Ifs parse_ifs(std::string_view text);

// the t of a `phit(t=...)` spec, empty for other kinds
std::optional<TSpec> phit_tspec(std::string_view text);

// `uniform` or `[p1,p2,...]`
BernoulliMeasure parse_measure(std::string_view text, std::size_t symbols);

// `a..b` or a single level
std::pair<int, int> parse_level_range(std::string_view text);

// `2^-k` or a plain number
double parse_scale(std::string_view text);

// `a:b:steps`
LambdaGrid parse_lambda_grid(std::string_view text);

// comma separated numbers, optional brackets
std::vector<double> parse_number_list(std::string_view text);

// decimal, `a/b`, or the names `inv_sqrt2`, `inv_golden`; evaluated at 256 bits
Real parse_real(std::string_view text);

// shortest round-trip decimal
std::string format_double(double x);
// RFC 4180 quoting when needed
std::string csv_field(std::string_view text);

// args exclude the program name. Exit codes: 0 ok, 2 usage/parse, 3 resource cap.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifslab::cli
