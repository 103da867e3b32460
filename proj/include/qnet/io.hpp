#ifndef QNET_IO_HPP
#define QNET_IO_HPP

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "qnet/network.hpp"

namespace qnet {

struct NetworkFile {
    NetworkSpec spec;
    std::optional<RealKernel> S; ///< weighting kernel, when present
};

/// Parses and fully validates a version-1 network spec file.
/// Throws ParseError / InvariantViolation with the offending field named.
NetworkFile parseNetworkFile(const std::string& path);
NetworkFile parseNetworkJson(const nlohmann::json& j);

nlohmann::json kernelToJson(const RealKernel& k);
RealKernel kernelFromJson(const nlohmann::json& j, int nu, int rows, int cols,
                          const std::string& name);
nlohmann::json networkToJson(const NetworkFile& nf);

/// 17-significant-digit decimal formatting used in all CSV output.
std::string formatDouble(double x);

} // namespace qnet

#endif
