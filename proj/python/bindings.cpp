#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "cflb/detect.hpp"
#include "cflb/error.hpp"
#include "cflb/signal.hpp"
#include "cflb/solvers.hpp"
#include "cflb/spectral.hpp"
#include "cflb/synth.hpp"
#include "cflb/track.hpp"

namespace py = pybind11;
using namespace cflb;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

Signal2D to_signal(const RealArray& a) {
    if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return Signal2D(h, w, std::vector<double>(a.data(), a.data() + a.size()));
}

RealArray to_array(const Signal2D& s) {
    RealArray out({s.height(), s.width()});
    std::copy(s.samples().begin(), s.samples().end(), out.mutable_data());
    return out;
}

ComplexArray to_array(const Spectrum2D& s) {
    ComplexArray out({s.shape().height, s.shape().width});
    std::copy(s.coefficients().begin(), s.coefficients().end(), out.mutable_data());
    return out;
}

Spectrum2D to_spectrum(const ComplexArray& a) {
    if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array");
    return Spectrum2D(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                      std::vector<Complex>(a.data(), a.data() + a.size()));
}

std::vector<Signal2D> to_signals(const std::vector<RealArray>& arrays) {
    std::vector<Signal2D> out;
    for (const auto& a : arrays) out.push_back(to_signal(a));
    return out;
}

RegularizedProblem problem(const std::vector<RealArray>& xs, const std::vector<RealArray>& ys,
                           std::pair<int, int> filter, double lambda) {
    RegularizedProblem p;
    p.xs = to_signals(xs);
    p.ys = to_signals(ys);
    p.lambda = lambda;
    if (p.xs.empty()) throw InvalidArgument("need at least one training signal");
    p.mask = MaskSpec::centered(p.xs.front().shape(), {filter.first, filter.second});
    p.validate();
    return p;
}

struct PyAdmmResult {
    RealArray h;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective;
    std::vector<double> relative_residual;
};

struct PyTrackResult {
    std::vector<std::pair<int, int>> centers;
    std::vector<double> errors;
    std::vector<double> psr;
    double fps = 0.0;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "cflb core: correlation filters with limited boundaries";
    m.attr("__version__") = CFLB_PY_VERSION;

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<DegenerateInput> degenerate(m, "DegenerateInput", error.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", error.ptr());
    static py::exception<IoError> io(m, "IoError", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DegenerateInput& e) {
            degenerate(e.what());
        } catch (const NumericalError& e) {
            numerical(e.what());
        } catch (const IoError& e) {
            io(e.what());
        } catch (const Error& e) {
            error(e.what());
        }
    });

    m.def("dft2", [](const RealArray& x) { return to_array(dft2(to_signal(x))); }, py::arg("x"),
          "Unnormalised forward 2-D DFT.");
    m.def("idft2", [](const ComplexArray& s) { return to_array(idft2(to_spectrum(s))); }, py::arg("spectrum"),
          "Inverse 2-D DFT (1/D scaling) of a Hermitian spectrum; returns the real part.");
    m.def("preprocess", [](const RealArray& x) { return to_array(preprocess(to_signal(x))); }, py::arg("x"));
    m.def(
        "anchored_response",
        [](std::pair<int, int> outer, std::pair<int, int> filter, std::pair<int, int> center, double sigma) {
            const MaskSpec mask = MaskSpec::centered({outer.first, outer.second}, {filter.first, filter.second});
            return to_array(anchored_response(mask, {center.first, center.second}, sigma));
        },
        py::arg("window"), py::arg("filter"), py::arg("center"), py::arg("sigma"),
        "Desired response for a target at `center`, aligned with the centred filter mask.");

    m.def(
        "mosse_train",
        [](const std::vector<RealArray>& xs, const std::vector<RealArray>& ys, double lambda) {
            const auto x = to_signals(xs);
            const auto y = to_signals(ys);
            return to_array(mosse_train(x, y, lambda).h);
        },
        py::arg("xs"), py::arg("ys"), py::arg("lam") = 1e-2, "Closed-form MOSSE filter (spatial, full window).");
    m.def(
        "spatial_ridge_oracle",
        [](const std::vector<RealArray>& xs, const std::vector<RealArray>& ys, double lambda) {
            const auto x = to_signals(xs);
            const auto y = to_signals(ys);
            return to_array(spatial_ridge_oracle(x, y, lambda));
        },
        py::arg("xs"), py::arg("ys"), py::arg("lam") = 1e-2);
    m.def(
        "masked_spatial_oracle",
        [](const std::vector<RealArray>& xs, const std::vector<RealArray>& ys, std::pair<int, int> filter,
           double lambda) { return to_array(masked_spatial_oracle(problem(xs, ys, filter, lambda))); },
        py::arg("xs"), py::arg("ys"), py::arg("filter"), py::arg("lam") = 1e-2,
        "Dense solve of the masked objective with a centred filter of shape `filter`.");
    m.def(
        "masked_objective",
        [](const std::vector<RealArray>& xs, const std::vector<RealArray>& ys, const RealArray& h, double lambda) {
            const Signal2D hs = to_signal(h);
            const RegularizedProblem p = problem(xs, ys, {hs.height(), hs.width()}, lambda);
            return masked_objective_enumerated(p, hs);
        },
        py::arg("xs"), py::arg("ys"), py::arg("h"), py::arg("lam") = 1e-2);

    py::class_<PyAdmmResult>(m, "AdmmResult")
        .def_readonly("h", &PyAdmmResult::h)
        .def_readonly("iterations", &PyAdmmResult::iterations)
        .def_readonly("converged", &PyAdmmResult::converged)
        .def_readonly("objective", &PyAdmmResult::objective)
        .def_readonly("relative_residual", &PyAdmmResult::relative_residual);
    m.def(
        "cflb_admm_train",
        [](const std::vector<RealArray>& xs, const std::vector<RealArray>& ys, std::pair<int, int> filter,
           double lambda, double mu0, double beta, double mu_max, int max_iters, double rel_tol,
           std::optional<double> change_tol, const std::string& units) {
            AdmmParams a;
            a.mu0 = mu0;
            a.beta = beta;
            a.mu_max = mu_max;
            a.max_iters = max_iters;
            a.rel_tol = rel_tol;
            a.change_tol = change_tol;
            if (units == "absolute") {
                a.units = PenaltyUnits::absolute;
            } else if (units != "relative") {
                throw InvalidArgument("units must be 'relative' or 'absolute'");
            }
            const AdmmResult r = cflb_admm_train(problem(xs, ys, filter, lambda), a);
            PyAdmmResult out{to_array(r.model.h), r.state.iter, r.state.converged, {}, {}};
            for (const auto& it : r.state.trace) {
                out.objective.push_back(it.objective);
                out.relative_residual.push_back(it.relative_residual);
            }
            return out;
        },
        py::arg("xs"), py::arg("ys"), py::arg("filter"), py::arg("lam") = 1e-2, py::arg("mu0") = AdmmParams{}.mu0,
        py::arg("beta") = AdmmParams{}.beta, py::arg("mu_max") = AdmmParams{}.mu_max,
        py::arg("max_iters") = AdmmParams{}.max_iters, py::arg("rel_tol") = AdmmParams{}.rel_tol,
        py::arg("change_tol") = py::none(), py::arg("units") = "relative",
        "ADMM solve of the masked objective; the filter is centred in the training window.");

    m.def(
        "correlate",
        [](const RealArray& h, const RealArray& image) {
            const Signal2D hs = to_signal(h);
            const Signal2D img = to_signal(image);
            const MaskSpec mask = MaskSpec::centered(img.shape(), hs.shape());
            const ResponseMap r = correlate(hs, mask, img);
            const Pixel at = locate(r, mask);
            return py::make_tuple(to_array(r.response), py::make_tuple(at.row, at.col));
        },
        py::arg("h"), py::arg("image"),
        "Response map of a filter centred in the image frame, plus the located target pixel.");
    m.def(
        "psr",
        [](const RealArray& response, int radius) { return psr(make_response_map(to_signal(response)), radius); },
        py::arg("response"), py::arg("exclusion_radius") = 5);
    m.def(
        "count_unaffected_shifts",
        [](int window, int filter, int offset) {
            const ShiftCount c = count_unaffected_shifts(window, filter, offset);
            return py::make_tuple(c.unaffected, c.total);
        },
        py::arg("window"), py::arg("filter"), py::arg("offset") = 0);

    m.def(
        "localization_set",
        [](int count, std::uint64_t seed) {
            synth::LocalizationSuiteParams p;
            p.seed = seed;
            py::list out;
            for (const auto& s : synth::localization_set(p, count)) {
                out.append(py::make_tuple(to_array(s.image), py::make_tuple(s.target.row, s.target.col),
                                          py::make_tuple(s.reference.row, s.reference.col)));
            }
            return out;
        },
        py::arg("count"), py::arg("seed") = 0, "List of (image, target, reference) tuples.");
    m.def(
        "tracking_sequence",
        [](int frames, std::uint64_t seed) {
            synth::TrackingSequenceParams p;
            p.frames = frames;
            p.seed = seed;
            const auto seq = synth::tracking_sequence(p);
            py::list fr;
            for (const auto& f : seq.frames) fr.append(to_array(f));
            std::vector<std::pair<double, double>> truth;
            for (const auto& t : seq.truth) truth.emplace_back(t.row, t.col);
            return py::make_tuple(fr, truth, py::make_tuple(seq.init.row, seq.init.col, seq.init.height, seq.init.width));
        },
        py::arg("frames") = 60, py::arg("seed") = 0, "(frames, truth centres, init box (row, col, height, width)).");

    py::class_<PyTrackResult>(m, "TrackResult")
        .def_readonly("centers", &PyTrackResult::centers)
        .def_readonly("errors", &PyTrackResult::errors)
        .def_readonly("psr", &PyTrackResult::psr)
        .def_readonly("fps", &PyTrackResult::fps);
    m.def(
        "run_tracker",
        [](const std::vector<RealArray>& frames, std::tuple<int, int, int, int> box,
           std::optional<std::vector<std::pair<double, double>>> truth, int admm_iters, double eta, double lambda) {
            TrackerParams p;
            p.admm_iters = admm_iters;
            p.eta = eta;
            p.lambda = lambda;
            const auto fs = to_signals(frames);
            std::vector<Point> gt;
            if (truth) {
                for (const auto& [r, c] : *truth) gt.push_back({r, c});
            }
            const auto [r, c, h, w] = box;
            TrackRecord rec;
            {
                py::gil_scoped_release release;
                rec = run_tracker(fs, BBox{r, c, h, w}, p, gt);
            }
            PyTrackResult out;
            double secs = 0.0;
            for (const auto& f : rec.frames) {
                out.centers.emplace_back(f.predicted.row, f.predicted.col);
                out.errors.push_back(f.error);
                out.psr.push_back(f.psr);
                secs += f.seconds;
            }
            out.fps = secs > 0.0 ? static_cast<double>(rec.frames.size()) / secs : 0.0;
            return out;
        },
        py::arg("frames"), py::arg("box"), py::arg("truth") = py::none(), py::arg("admm_iters") = 4,
        py::arg("eta") = 0.025, py::arg("lam") = 1e-2,
        "Tracks from an initial (row, col, height, width) box; errors are NaN without truth.");
}
