// Command line front end: validation, spectra, QEF rates, finite-horizon
// oracle checks and series composition for translation invariant quantum
// networks described by JSON spec files.

#include <CLI11.hpp>
#include <array>
#include <iostream>

#include "qnet/io.hpp"
#include "qnet/oracle.hpp"

using namespace qnet;
using nlohmann::json;

namespace {

WeightedNetwork loadWeighted(const std::string& path) {
    NetworkFile nf = parseNetworkFile(path);
    RealKernel S = nf.S ? *nf.S : [&] {
        // Default weighting: identity at offset 0 (Z = X).
        RealKernel ident(nf.spec.nu, nf.spec.n, nf.spec.n);
        ident.set(Offset(nf.spec.nu, 0), Eigen::MatrixXd::Identity(nf.spec.n, nf.spec.n));
        return ident;
    }();
    return WeightedNetwork(std::move(nf.spec), std::move(S));
}

json configHeader(const std::string& command, int nSigma, int nLambda) {
    json j;
    j["command"] = command;
    j["version"] = 1;
    j["nsigma"] = nSigma;
    j["nlambda"] = nLambda;
    return j;
}

void emitSummary(const json& j) { std::cerr << j.dump() << "\n"; }

std::string csvField(double x) { return formatDouble(x); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Translation invariant quantum network analysis"};
    app.require_subcommand(1);

    std::string file, file2, outPath;
    int nSigma = 64, nLambda = 257;
    std::vector<double> thetas{0.5};
    std::vector<double> Tlist{1.0, 2.0, 4.0};
    std::vector<int> Llist{1, 2, 4, 8};
    double thetaMax = 0.5, alpha = 0.1, theta = 0.5;
    int steps = 100, checkpointInterval = 10, fragmentL = 1, NtPerT = 20, degree = 1;
    std::string mode = "operator";
    std::vector<double> sigmas{0.0};
    std::vector<double> lambdas{0.0};

    auto addGrid = [&](CLI::App* c) {
        c->add_option("--nsigma", nSigma, "torus grid points per dimension");
        c->add_option("--nlambda", nLambda, "Gauss-Legendre points on the frequency line");
    };

    auto* vcmd = app.add_subcommand("validate", "physical realizability and stability report");
    vcmd->add_option("file", file)->required();
    addGrid(vcmd);

    auto* scmd = app.add_subcommand("spectra", "quantum spectral density samples");
    scmd->add_option("file", file)->required();
    scmd->add_option("--sigma", sigmas, "sigma sample values (first lattice coordinate)")->delimiter(',');
    scmd->add_option("--lambda", lambdas, "temporal frequency samples")->delimiter(',');

    auto* rcmd = app.add_subcommand("rate", "spatio-temporal QEF growth rate");
    rcmd->add_option("file", file)->required();
    rcmd->add_option("--theta", thetas, "risk sensitivity values")->delimiter(',');
    addGrid(rcmd);

    auto* ccmd = app.add_subcommand("classical", "commutator-free rate and admissible bound");
    ccmd->add_option("file", file)->required();
    ccmd->add_option("--theta", thetas)->delimiter(',');
    addGrid(ccmd);

    auto* hcmd = app.add_subcommand("homotopy", "Riccati continuation of the rate in theta");
    hcmd->add_option("file", file)->required();
    hcmd->add_option("--theta-max", thetaMax);
    hcmd->add_option("--steps", steps);
    hcmd->add_option("--checkpoint-interval", checkpointInterval);
    addGrid(hcmd);

    auto* ecmd = app.add_subcommand("expansion", "small-theta expansion of the rate");
    ecmd->add_option("file", file)->required();
    ecmd->add_option("--theta", thetas)->delimiter(',');
    addGrid(ecmd);

    auto* tcmd = app.add_subcommand("tailbound", "exponential tail bound via theta grid");
    tcmd->add_option("file", file)->required();
    tcmd->add_option("--alpha", alpha)->required();
    tcmd->add_option("--theta", thetas)->delimiter(',');
    addGrid(tcmd);

    auto* ocmd = app.add_subcommand("oracle", "finite-horizon convergence study");
    ocmd->add_option("file", file)->required();
    ocmd->add_option("--theta", theta);
    ocmd->add_option("--fragment", fragmentL, "cube side length");
    ocmd->add_option("--T", Tlist, "horizons")->delimiter(',');
    ocmd->add_option("--nt-per-t", NtPerT);
    addGrid(ocmd);

    auto* acmd = app.add_subcommand("avgcheck", "Toeplitz / operator averaging checks");
    acmd->add_option("file", file)->required();
    acmd->add_option("--mode", mode)->check(CLI::IsMember({"toeplitz", "operator"}));
    acmd->add_option("--degree", degree, "power in the trace product");
    acmd->add_option("--L", Llist, "cube sides (toeplitz mode)")->delimiter(',');
    acmd->add_option("--T", Tlist, "horizons (operator mode)")->delimiter(',');
    acmd->add_option("--fragment", fragmentL);
    acmd->add_option("--nt-per-t", NtPerT);
    addGrid(acmd);

    auto* pcmd = app.add_subcommand("compose", "series interconnection report");
    pcmd->add_option("upstream", file)->required();
    pcmd->add_option("downstream", file2)->required();
    addGrid(pcmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (vcmd->parsed()) {
            NetworkFile nf = parseNetworkFile(file);
            DynamicsKernels dyn = assembleDynamics(nf.spec);
            const auto grid = torusGrid(nf.spec.nu, nSigma);
            const PrResiduals pr = prResiduals(dyn, nf.spec.theta, grid);
            std::vector<std::pair<Eigen::VectorXd, std::complex<double>>> samples;
            for (const auto& sg : {0, nSigma / 3, nSigma / 2})
                for (double im : {0.3, 1.1, 2.7})
                    samples.emplace_back(grid[sg % grid.size()], std::complex<double>(0.5, im));
            json rep = configHeader("validate", nSigma, nLambda);
            rep["pr1"] = pr.pr1;
            rep["pr2"] = pr.pr2;
            rep["pr3"] = pr.pr3;
            rep["jj"] = jjUnitarityResidual(dyn, samples);
            rep["stability_margin"] = stabilityMargin(dyn, grid);
            std::cout << rep.dump(2) << "\n";
            return 0;
        }
        if (scmd->parsed()) {
            WeightedNetwork wnet = loadWeighted(file);
            emitSummary(configHeader("spectra", nSigma, nLambda));
            const int q = wnet.q();
            std::cout << "sigma,lambda";
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b)
                    std::cout << ",phi_" << a << b << "_re,phi_" << a << b << "_im,psi_" << a << b
                              << "_re,psi_" << a << b << "_im";
            std::cout << "\r\n";
            for (double sg : sigmas)
                for (double lm : lambdas) {
                    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(wnet.nu());
                    sigma[0] = sg;
                    const SpectralSample s = quantumSpectralDensity(wnet, sigma, lm);
                    std::cout << csvField(sg) << "," << csvField(lm);
                    for (int a = 0; a < q; ++a)
                        for (int b = 0; b < q; ++b)
                            std::cout << "," << csvField(s.Phi(a, b).real()) << ","
                                      << csvField(s.Phi(a, b).imag()) << ","
                                      << csvField(s.Psi(a, b).real()) << ","
                                      << csvField(s.Psi(a, b).imag());
                    std::cout << "\r\n";
                }
            return 0;
        }

        if (pcmd->parsed()) {
            NetworkFile up = parseNetworkFile(file);
            NetworkFile down = parseNetworkFile(file2);
            const SeriesComposite comp = composeSeries(up.spec, down.spec);
            const auto grid = torusGrid(up.spec.nu, nSigma);
            const PrResiduals pr = prResiduals(comp.dyn, comp.theta, grid);
            // product law F = F2 F1 at a few samples
            DynamicsKernels d1 = assembleDynamics(up.spec);
            DynamicsKernels d2 = assembleDynamics(down.spec);
            double productResidual = 0.0;
            for (const auto& sg : {0, nSigma / 3, nSigma / 2}) {
                const Eigen::VectorXd sigma = grid[sg % grid.size()];
                const std::complex<double> s(0.4, 1.3);
                const Eigen::MatrixXcd lhs = transferFunction(comp.dyn, sigma, s);
                const Eigen::MatrixXcd rhs =
                    transferFunction(d2, sigma, s) * transferFunction(d1, sigma, s);
                productResidual = std::max(productResidual, (lhs - rhs).norm());
            }
            json rep = configHeader("compose", nSigma, nLambda);
            rep["n"] = comp.n1 + comp.n2;
            rep["pr1"] = pr.pr1;
            rep["pr2"] = pr.pr2;
            rep["pr3"] = pr.pr3;
            rep["stability_margin"] = stabilityMargin(comp.dyn, grid);
            rep["transfer_product_residual"] = productResidual;
            std::cout << rep.dump(2) << "\n";
            return 0;
        }

        WeightedNetwork wnet = loadWeighted(file);
        const QuadratureGrid grid = makeGrid(wnet.nu(), nSigma, nLambda);

        if (rcmd->parsed()) {
            emitSummary(configHeader("rate", nSigma, nLambda));
            std::vector<std::array<double, 4>> rows;
            for (double th : thetas) {
                const RateResult r = qefRate(wnet, th, grid);
                rows.push_back({th, r.value, admissibilityMargin(wnet, th, grid), r.errEstimate});
            }
            std::cout << "theta,upsilon,margin,err_est\r\n";
            for (const auto& row : rows)
                std::cout << csvField(row[0]) << "," << csvField(row[1]) << ","
                          << csvField(row[2]) << "," << csvField(row[3]) << "\r\n";
        } else if (ccmd->parsed()) {
            emitSummary(configHeader("classical", nSigma, nLambda));
            const double thetaStar = classicalThetaStar(wnet, grid);
            std::vector<std::array<double, 2>> rows;
            for (double th : thetas) rows.push_back({th, classicalRate(wnet, th, grid)});
            std::cout << "theta,upsilon_classical,theta_star\r\n";
            for (const auto& row : rows)
                std::cout << csvField(row[0]) << "," << csvField(row[1]) << ","
                          << csvField(thetaStar) << "\r\n";
        } else if (hcmd->parsed()) {
            json hdr = configHeader("homotopy", nSigma, nLambda);
            hdr["theta_max"] = thetaMax;
            hdr["steps"] = steps;
            emitSummary(hdr);
            const RateProfile prof =
                homotopyRate(wnet, thetaMax, steps, grid, checkpointInterval);
            std::cout << "theta,upsilon,margin,method\r\n";
            for (const auto& rec : prof)
                std::cout << csvField(rec.theta) << "," << csvField(rec.upsilon) << ","
                          << csvField(rec.margin) << "," << rec.method << "\r\n";
        } else if (ecmd->parsed()) {
            emitSummary(configHeader("expansion", nSigma, nLambda));
            std::vector<std::array<double, 2>> rows;
            for (double th : thetas) rows.push_back({th, smallThetaExpansion(wnet, th, grid)});
            std::cout << "theta,upsilon_expansion\r\n";
            for (const auto& row : rows)
                std::cout << csvField(row[0]) << "," << csvField(row[1]) << "\r\n";
        } else if (tcmd->parsed()) {
            json hdr = configHeader("tailbound", nSigma, nLambda);
            hdr["alpha"] = alpha;
            emitSummary(hdr);
            std::cout << "alpha,bound\r\n";
            std::cout << csvField(alpha) << "," << csvField(tailBound(wnet, alpha, thetas, grid))
                      << "\r\n";
        } else if (ocmd->parsed()) {
            json hdr = configHeader("oracle", nSigma, nLambda);
            hdr["theta"] = theta;
            hdr["fragment"] = fragmentL;
            hdr["nt_per_t"] = NtPerT;
            emitSummary(hdr);
            const Fragment G = cubeFragment(wnet.nu(), fragmentL);
            std::cout << "T,rate_per_t,error\r\n";
            for (const auto& row : temporalConvergenceStudy(wnet, G, theta, Tlist, NtPerT, nSigma))
                std::cout << csvField(row.T) << "," << csvField(row.ratePerT) << ","
                          << csvField(row.error) << "\r\n";
        } else if (acmd->parsed()) {
            json hdr = configHeader("avgcheck", nSigma, nLambda);
            hdr["mode"] = mode;
            hdr["degree"] = degree;
            emitSummary(hdr);
            std::cout << "scale,lhs,rhs,error\r\n";
            std::vector<AverageRow> rows;
            if (mode == "toeplitz") {
                std::vector<RealKernel> kernels(degree, wnet.dynamics().A);
                rows = toeplitzAverageCheck(kernels, Llist, nSigma);
            } else {
                const Fragment G = cubeFragment(wnet.nu(), fragmentL);
                rows = operatorAverageCheck(wnet, G, Tlist, degree, NtPerT, nSigma, nLambda);
            }
            for (const auto& row : rows)
                std::cout << csvField(row.scale) << "," << csvField(row.lhs) << ","
                          << csvField(row.rhs) << "," << csvField(row.error) << "\r\n";
        }
        return 0;
    } catch (const NotAdmissible& e) {
        json err{{"error", e.what()}, {"type", "NotAdmissible"}};
        std::cout << err.dump() << "\n";
        return 2;
    } catch (const ParseError& e) {
        json err{{"error", e.what()}, {"type", "ParseError"}};
        std::cout << err.dump() << "\n";
        return 3;
    } catch (const InvariantViolation& e) {
        json err{{"error", e.what()}, {"type", "InvariantViolation"}};
        std::cout << err.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        json err{{"error", e.what()}, {"type", "Error"}};
        std::cout << err.dump() << "\n";
        return 1;
    }
}
