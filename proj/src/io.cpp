#include "qnet/io.hpp"

#include <cstdio>
#include <fstream>

namespace qnet {

using nlohmann::json;

namespace {

std::string offsetString(const Offset& ell) {
    std::string s = "[";
    for (std::size_t k = 0; k < ell.size(); ++k) {
        if (k) s += ", ";
        s += std::to_string(ell[k]);
    }
    return s + "]";
}

Eigen::MatrixXd matrixFromJson(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ParseError(name + " must be a row-major numeric matrix (array of arrays)");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            throw ParseError(name + " has ragged rows");
        for (int c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) throw ParseError(name + " has a non-numeric entry");
            M(i, c) = j[i][c].get<double>();
        }
    }
    return M;
}

json matrixToJson(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(i, c));
        rows.push_back(row);
    }
    return rows;
}

int intField(const json& j, const std::string& name) {
    if (!j.contains(name)) throw ParseError("missing field: " + name);
    if (!j[name].is_number_integer()) throw ParseError(name + " must be an integer");
    return j[name].get<int>();
}

} // namespace

RealKernel kernelFromJson(const json& j, int nu, int rows, int cols, const std::string& name) {
    if (!j.is_array()) throw ParseError(name + " must be a list of {offset, block} records");
    if (rows <= 0) { // infer block height from the first record (used for S)
        if (j.empty() || !j.front().contains("block") || !j.front()["block"].is_array() ||
            j.front()["block"].empty())
            throw ParseError(name + " must be a nonempty list of {offset, block} records");
        rows = static_cast<int>(j.front()["block"].size());
    }
    RealKernel k(nu, rows, cols);
    for (const auto& rec : j) {
        if (!rec.contains("offset") || !rec.contains("block"))
            throw ParseError(name + " record needs offset and block fields");
        const auto& off = rec["offset"];
        if (!off.is_array() || static_cast<int>(off.size()) != nu)
            throw ParseError(name + " offset must have length " + std::to_string(nu));
        Offset ell(nu);
        for (int d = 0; d < nu; ++d) {
            if (!off[d].is_number_integer()) throw ParseError(name + " offset must be integer");
            ell[d] = off[d].get<int>();
        }
        const Eigen::MatrixXd blk = matrixFromJson(rec["block"], name + " block");
        if (blk.rows() != rows || blk.cols() != cols)
            throw ParseError(name + " block at offset " + offsetString(ell) + " must be " +
                             std::to_string(rows) + "x" + std::to_string(cols));
        if (k.terms().count(ell)) throw ParseError(name + " has duplicate offset " + offsetString(ell));
        k.set(ell, blk);
    }
    return k;
}

json kernelToJson(const RealKernel& k) {
    json out = json::array();
    for (const auto& [ell, blk] : k.terms()) {
        json rec;
        rec["offset"] = ell;
        rec["block"] = matrixToJson(blk);
        out.push_back(rec);
    }
    return out;
}

NetworkFile parseNetworkJson(const json& j) {
    if (!j.is_object()) throw ParseError("network spec must be a JSON object");
    if (intField(j, "version") != 1) throw ParseError("unsupported network spec version");
    NetworkFile nf;
    NetworkSpec& spec = nf.spec;
    spec.nu = intField(j, "nu");
    spec.n = intField(j, "n");
    spec.m = intField(j, "m");
    spec.r = intField(j, "r");
    if (!j.contains("theta")) throw ParseError("missing field: theta");
    spec.theta = matrixFromJson(j["theta"], "theta");
    if (spec.theta.rows() != spec.n || spec.theta.cols() != spec.n)
        throw ParseError("theta must be n x n");
    if (!j.contains("R")) throw ParseError("missing field: R");
    if (!j.contains("M")) throw ParseError("missing field: M");
    if (!j.contains("D")) throw ParseError("missing field: D");
    spec.R = kernelFromJson(j["R"], spec.nu, spec.n, spec.n, "R");
    spec.M = kernelFromJson(j["M"], spec.nu, spec.m, spec.n, "M");
    spec.D = kernelFromJson(j["D"], spec.nu, spec.r, spec.m, "D");
    spec.validate();
    if (j.contains("S")) {
        RealKernel S = kernelFromJson(j["S"], spec.nu, -1, spec.n, "S");
        nf.S = std::move(S);
    }
    return nf;
}

NetworkFile parseNetworkFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return parseNetworkJson(j);
}

json networkToJson(const NetworkFile& nf) {
    json j;
    j["version"] = 1;
    j["nu"] = nf.spec.nu;
    j["n"] = nf.spec.n;
    j["m"] = nf.spec.m;
    j["r"] = nf.spec.r;
    j["theta"] = matrixToJson(nf.spec.theta);
    j["R"] = kernelToJson(nf.spec.R);
    j["M"] = kernelToJson(nf.spec.M);
    j["D"] = kernelToJson(nf.spec.D);
    if (nf.S) j["S"] = kernelToJson(*nf.S);
    return j;
}

std::string formatDouble(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace qnet
