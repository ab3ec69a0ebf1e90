#pragma once

#include "medianscape/qbfs.hpp"
#include "medianscape/space.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace medianscape {

/// Malformed input file; carries the 1-based line number.
struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(const std::string& msg, std::size_t line_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ")"), line(line_)
    {
    }
};

/// Shortest decimal form that round-trips a double exactly (17 significant
/// digits); all CLI numeric output goes through this.
std::string format_g17(double v);

/// Space file, coordinate form: header `id,x1[,x2...],mass`.
MetricMeasureSpace read_space_csv(const std::string& path, double snowflake = 1.0);
void write_space_csv(const MetricMeasureSpace& space, const std::string& path);

/// Space file, table form: `id_a,id_b,dist` triples plus an `id,mass` file.
MetricMeasureSpace read_space_table(const std::string& dist_path,
                                    const std::string& mass_path);

/// Function file: `id,value`, ids matching the space file.
std::vector<double> read_function_csv(const std::string& path, std::size_t expected_size);
void write_function_csv(const std::string& path, const std::vector<double>& values);

/// Variable exponent file: `id,p`.
std::vector<double> read_exponent_csv(const std::string& path, std::size_t expected_size);

/// Quasinorm spec file: key=value lines with `variant` in
/// {lp, lorentz, orlicz, varexp}; numeric parameters `p`, `q`; for Orlicz
/// `phi=power(p)|power_log(p)|exp_minus_one` or `phi_table=<path>` (two
/// columns t,phi); for VarExp `pfile=<csv path>`.
QuasinormSpec read_spec_file(const std::string& path, const MetricMeasureSpace* space);

} // namespace medianscape
