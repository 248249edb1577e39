/// @file report_io.hpp
/// @brief JSON and CSV serialization of chains, splittings, solve reports
/// and field-of-values data.

#ifndef BAMG_REPORT_IO_HPP
#define BAMG_REPORT_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bamg/chains.hpp"
#include "bamg/coarsening.hpp"
#include "bamg/krylov.hpp"
#include "bamg/spectral.hpp"

namespace bamg {

using Json = nlohmann::ordered_json;

Json to_json(const CfSplitting& split);
Json to_json(const SetupConfig& cfg);
/// Timings are omitted unless requested so reports stay reproducible.
Json to_json(const SolveReport& report, bool include_timings = false);
Json to_json(const FovResult& fov);

void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// One value per line, %.17g.
void write_vector_csv(const std::filesystem::path& path, std::span<const double> x, const std::string& header);

/// Boundary points and eigenvalues as "re,im" rows.
void write_complex_csv(const std::filesystem::path& path, std::span<const Complex> z);

/// Writes <stem>_A.mtx, <stem>_B.mtx and <stem>.json (family, params, n, seed).
void export_chain(const ChainProblem& problem, const std::filesystem::path& dir, const std::string& stem);

/// Creates the directory or raises IoError.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace bamg

#endif  // BAMG_REPORT_IO_HPP
