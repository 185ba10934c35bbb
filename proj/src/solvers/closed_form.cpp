#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "cflb/solvers.hpp"

namespace cflb {
namespace {

long wrap(long v, long n) {
    const long r = v % n;
    return r < 0 ? r + n : r;
}

void check_training_pairs(std::span<const Signal2D> xs, std::span<const Signal2D> ys,
                          const char* who) {
    if (xs.empty()) throw InvalidArgument(std::string(who) + ": empty training set");
    if (xs.size() != ys.size()) throw InvalidArgument(std::string(who) + ": xs/ys length mismatch");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].shape() != xs.front().shape() || ys[i].shape() != xs.front().shape()) {
            throw InvalidArgument(std::string(who) + ": shape mismatch in pair " + std::to_string(i));
        }
    }
}

// Normal equations of the cropped-shift regression, assembled by enumerating every
// circular shift explicitly.
Signal2D solve_enumerated(std::span<const Signal2D> xs, std::span<const Signal2D> ys, double lambda,
                          const MaskSpec& mask, const char* who) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument(std::string(who) + ": lambda must be non-negative");
    }
    const std::size_t d = mask.inner.count();
    if (d > kOracleMaxElements) {
        throw InvalidArgument(std::string(who) + ": filter has " + std::to_string(d) +
                              " elements, oracle limit is " + std::to_string(kOracleMaxElements));
    }
    const int th = mask.outer.height;
    const int tw = mask.outer.width;
    const std::size_t t = mask.outer.count();

    Eigen::MatrixXd normal = Eigen::MatrixXd::Identity(static_cast<long>(d), static_cast<long>(d)) * lambda;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<long>(d));
    Eigen::MatrixXd shifts(static_cast<long>(t), static_cast<long>(d));
    Eigen::VectorXd targets(static_cast<long>(t));

    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Signal2D& x = xs[i];
        const Signal2D& y = ys[i];
        long row = 0;
        for (int jr = 0; jr < th; ++jr) {
            for (int jc = 0; jc < tw; ++jc, ++row) {
                long col = 0;
                for (int kr = 0; kr < mask.inner.height; ++kr) {
                    const int sr = static_cast<int>(wrap(mask.offset.row + kr + jr, th));
                    for (int kc = 0; kc < mask.inner.width; ++kc, ++col) {
                        shifts(row, col) = x(sr, static_cast<int>(wrap(mask.offset.col + kc + jc, tw)));
                    }
                }
                targets(row) = y(jr, jc);
            }
        }
        normal.selfadjointView<Eigen::Lower>().rankUpdate(shifts.transpose());
        rhs.noalias() += shifts.transpose() * targets;
    }
    normal.triangularView<Eigen::StrictlyUpper>() = normal.transpose();

    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
        throw NumericalError(std::string(who) + ": normal matrix is numerically singular");
    }
    const Eigen::VectorXd h = llt.solve(rhs);
    std::vector<double> samples(h.data(), h.data() + h.size());
    for (double v : samples) {
        if (!std::isfinite(v)) throw NumericalError(std::string(who) + ": non-finite solution");
    }
    return Signal2D(mask.inner.height, mask.inner.width, std::move(samples));
}

}  // namespace

void RegularizedProblem::validate() const {
    mask.validate();
    check_training_pairs(xs, ys, "RegularizedProblem");
    if (xs.front().shape() != mask.outer) {
        throw InvalidArgument("RegularizedProblem: training windows do not match the mask's outer shape");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("RegularizedProblem: lambda must be positive");
    }
}

Spectrum2D template_spectrum(const Signal2D& s) { return conj(dft2(s)); }

Signal2D template_spatial(const Spectrum2D& t) { return idft2(conj(t)); }

FilterModel FilterModel::from_filter(Signal2D h, const MaskSpec& mask, SpectralEnergies energies,
                                     double lambda) {
    FilterModel m;
    m.h_hat_padded = dft2(pad(h, mask));
    m.h = std::move(h);
    m.energies = std::move(energies);
    m.mask = mask;
    m.lambda = lambda;
    return m;
}

FilterModel mosse_from_energies(const SpectralEnergies& e, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("mosse_train: lambda must be positive");
    }
    Spectrum2D t(e.shape());
    auto out = t.coefficients();
    const auto sxx = e.s_xx.coefficients();
    const auto sxy = e.s_xy.coefficients();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = sxy[k] / (sxx[k].real() + lambda);
    if (!t.all_finite()) throw NumericalError("mosse_train: non-finite filter spectrum");
    return FilterModel::from_filter(template_spatial(t), MaskSpec::identity(e.shape()), e, lambda);
}

FilterModel mosse_train(std::span<const Signal2D> xs, std::span<const Signal2D> ys, double lambda) {
    check_training_pairs(xs, ys, "mosse_train");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("mosse_train: lambda must be positive");
    }
    return mosse_from_energies(spectral_energies(xs, ys), lambda);
}

Signal2D spatial_ridge_oracle(std::span<const Signal2D> xs, std::span<const Signal2D> ys,
                              double lambda) {
    check_training_pairs(xs, ys, "spatial_ridge_oracle");
    return solve_enumerated(xs, ys, lambda, MaskSpec::identity(xs.front().shape()),
                            "spatial_ridge_oracle");
}

Signal2D masked_spatial_oracle(const RegularizedProblem& p) {
    p.validate();
    return solve_enumerated(p.xs, p.ys, p.lambda, p.mask, "masked_spatial_oracle");
}

Signal2D masked_oracle_from_energies(const SpectralEnergies& e, const MaskSpec& mask, double lambda) {
    mask.validate();
    if (e.shape() != mask.outer) throw InvalidArgument("masked_oracle_from_energies: energies do not match the mask");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("masked_oracle_from_energies: lambda must be positive");
    }
    const std::size_t d = mask.inner.count();
    if (d > kOracleMaxElements) {
        throw InvalidArgument("masked_oracle_from_energies: filter has " + std::to_string(d) +
                              " elements, oracle limit is " + std::to_string(kOracleMaxElements));
    }
    // Summed over all shifts, x(k + tau) x(l + tau) is the autocorrelation at l - k,
    // and y(tau) x(k + tau) the cross-correlation at k; both come from the energies.
    const Signal2D autocorr = idft2(e.s_xx);
    const Signal2D crosscorr = template_spatial(e.s_xy);
    const int th = mask.outer.height;
    const int tw = mask.outer.width;
    const int ih = mask.inner.height;
    const int iw = mask.inner.width;
    Eigen::MatrixXd normal(static_cast<long>(d), static_cast<long>(d));
    Eigen::VectorXd rhs(static_cast<long>(d));
    for (int kr = 0; kr < ih; ++kr) {
        for (int kc = 0; kc < iw; ++kc) {
            const long k = kr * iw + kc;
            rhs(k) = crosscorr(mask.offset.row + kr, mask.offset.col + kc);
            for (int lr = 0; lr < ih; ++lr) {
                const int dr = static_cast<int>(wrap(lr - kr, th));
                for (int lc = 0; lc < iw; ++lc) {
                    normal(k, lr * iw + lc) = autocorr(dr, static_cast<int>(wrap(lc - kc, tw)));
                }
            }
        }
    }
    normal.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
        throw NumericalError("masked_oracle_from_energies: normal matrix is numerically singular");
    }
    const Eigen::VectorXd h = llt.solve(rhs);
    std::vector<double> samples(h.data(), h.data() + h.size());
    for (double v : samples) {
        if (!std::isfinite(v)) throw NumericalError("masked_oracle_from_energies: non-finite solution");
    }
    return Signal2D(ih, iw, std::move(samples));
}

double masked_objective_enumerated(const RegularizedProblem& p, const Signal2D& h) {
    p.validate();
    if (h.shape() != p.mask.inner) throw InvalidArgument("masked_objective: filter shape mismatch");
    const MaskSpec& m = p.mask;
    const int th = m.outer.height;
    const int tw = m.outer.width;
    double data = 0.0;
    for (std::size_t i = 0; i < p.xs.size(); ++i) {
        for (int jr = 0; jr < th; ++jr) {
            for (int jc = 0; jc < tw; ++jc) {
                double r = 0.0;
                for (int kr = 0; kr < m.inner.height; ++kr) {
                    const int sr = static_cast<int>(wrap(m.offset.row + kr + jr, th));
                    for (int kc = 0; kc < m.inner.width; ++kc) {
                        r += h(kr, kc) * p.xs[i](sr, static_cast<int>(wrap(m.offset.col + kc + jc, tw)));
                    }
                }
                const double e = p.ys[i](jr, jc) - r;
                data += e * e;
            }
        }
    }
    return 0.5 * data + 0.5 * p.lambda * squared_norm(h);
}

double masked_objective(const SpectralEnergies& e, const MaskSpec& mask, double lambda,
                        const Signal2D& h) {
    if (e.shape() != mask.outer) throw InvalidArgument("masked_objective: energies/mask mismatch");
    if (h.shape() != mask.inner) throw InvalidArgument("masked_objective: filter shape mismatch");
    const Spectrum2D c = template_spectrum(pad(h, mask));
    const auto cc = c.coefficients();
    const auto sxx = e.s_xx.coefficients();
    const auto sxy = e.s_xy.coefficients();
    double cross = 0.0;
    double quad = 0.0;
    for (std::size_t k = 0; k < cc.size(); ++k) {
        cross += (std::conj(cc[k]) * sxy[k]).real();
        quad += std::norm(cc[k]) * sxx[k].real();
    }
    const double t = static_cast<double>(cc.size());
    return (e.s_yy - 2.0 * cross + quad) / (2.0 * t) + 0.5 * lambda * squared_norm(h);
}

ShiftCount count_unaffected_shifts(int window, int filter, int offset) {
    if (window <= 0 || filter <= 0 || filter > window) {
        throw InvalidArgument("count_unaffected_shifts: need 0 < filter <= window");
    }
    if (offset < 0 || offset + filter > window) {
        throw InvalidArgument("count_unaffected_shifts: offset places the support outside the window");
    }
    ShiftCount c{0, window};
    for (int j = 0; j < window; ++j) {
        bool wrapped = false;
        const int start = static_cast<int>(wrap(offset + j, window));
        for (int k = 1; k < filter && !wrapped; ++k) {
            // A wrap shows up as a non-consecutive source index inside the crop.
            wrapped = wrap(offset + j + k, window) != start + k;
        }
        if (!wrapped) ++c.unaffected;
    }
    return c;
}

}  // namespace cflb
