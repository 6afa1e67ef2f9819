#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oufreq {

struct OUBasis;

/// Library version string.
std::string_view version();

/// 64-bit FNV-1a digest, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex_digest(std::string_view bytes);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Comma-joined shortest representations.
std::string csv_join(std::span<const double> values);

/// "# key=value key=value" line; keys in sorted order.
std::string metadata_line(const std::map<std::string, std::string>& fields);

/// Digest of everything that defines a basis (angular data and modes).
std::string basis_hash(const OUBasis& basis);

/// JSON text {N, modes:[{j,n,alpha,gamma,mu,poly,norm}], residuals}.
std::string basis_json(const OUBasis& basis);

/// Writes a CSV file: metadata line, header, one row per vector.
void write_csv(const std::string& path, const std::map<std::string, std::string>& meta,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace oufreq
