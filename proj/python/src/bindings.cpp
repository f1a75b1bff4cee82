#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "cogarq/channel.hpp"
#include "cogarq/closedform.hpp"
#include "cogarq/dp.hpp"
#include "cogarq/errors.hpp"
#include "cogarq/hmm.hpp"
#include "cogarq/io.hpp"
#include "cogarq/policies.hpp"
#include "cogarq/sim.hpp"

namespace py = pybind11;
using namespace cogarq;

namespace {

MPolicyParams m_params(double p_ee, double p_ne, double w, double r_p, double r_s)
{
    MPolicyParams p{p_ee, p_ne, w, r_p, r_s};
    p.validate();
    return p;
}

py::object burst_to_py(const BurstLength& m)
{
    if (m.is_infinite())
        return py::none();
    return py::int_(m.value());
}

py::dict stats_to_dict(const RunStats& s)
{
    py::dict d;
    d["R_p"] = s.rate_p;
    d["R_s"] = s.rate_s;
    d["R"] = s.rate;
    d["stderr_p"] = s.stderr_p;
    d["stderr_s"] = s.stderr_s;
    d["stderr_R"] = s.stderr_r;
    d["slots"] = s.slots;
    d["replications"] = s.replications;
    d["transmit_count"] = s.transmit_count;
    return d;
}

ObservationSequence parse_symbols(const std::string& text, Regime regime)
{
    std::vector<Feedback> symbols;
    for (char c : text) {
        if (c == 'A' || c == 'a')
            symbols.push_back(Feedback::Ack);
        else if (c == 'N' || c == 'n')
            symbols.push_back(Feedback::Nack);
        else
            throw PreconditionError(std::string("feedback symbols must be A or N, got '") + c + "'");
    }
    return ObservationSequence::constant(std::move(symbols), regime);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Listen-or-transmit decisions for a secondary user overhearing primary ARQ feedback";
    m.attr("__version__") = std::string(version_string());

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DegenerateObservationError>(m, "DegenerateObservationError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    py::class_<ChannelModel>(m, "ChannelModel")
        .def_static("erasure", &ChannelModel::erasure, py::arg("p_ee"), py::arg("p_ne"), py::arg("r_p") = 1.0)
        .def_static("gilbert_elliot", &ChannelModel::gilbert_elliot, py::arg("p_bb"), py::arg("p_gb"),
                    py::arg("gamma1"), py::arg("gamma2"), py::arg("gamma3"), py::arg("gamma4"), py::arg("r_p") = 1.0)
        .def_static(
            "three_state",
            [](std::vector<std::vector<double>> rows, double r_p) {
                return ChannelModel::three_state(TransitionMatrix(std::move(rows)), r_p);
            },
            py::arg("transitions"), py::arg("r_p") = 1.0)
        .def_property_readonly("transitions", [](const ChannelModel& c) { return c.transitions().rows(); })
        .def_property_readonly("stationary", [](const ChannelModel& c) { return c.transitions().stationary(); })
        .def_property_readonly("labels", &ChannelModel::labels)
        .def_property_readonly("r_p", &ChannelModel::primary_reward)
        .def_property_readonly("preset", [](const ChannelModel& c) { return std::string(to_string(c.preset())); })
        .def("__repr__", [](const ChannelModel& c) {
            return "<ChannelModel " + std::string(to_string(c.preset())) + " states=" + std::to_string(c.states()) +
                   ">";
        });

    m.def(
        "optimal_m",
        [](double p_ee, double p_ne, double w, double r_p, double r_s) {
            return burst_to_py(optimal_m(m_params(p_ee, p_ne, w, r_p, r_s)));
        },
        py::arg("p_ee"), py::arg("p_ne"), py::arg("w"), py::arg("r_p") = 1.0, py::arg("r_s") = 1.0,
        "Optimal burst length after a NACK, or None when transmitting forever is optimal.");

    m.def(
        "evaluate_m_policy",
        [](std::uint64_t burst, double p_ee, double p_ne, double w, double r_p, double r_s) {
            const MPolicyEval e = evaluate_m_policy(burst, m_params(p_ee, p_ne, w, r_p, r_s));
            py::dict d;
            d["M"] = e.m;
            d["R_p"] = e.rate_p;
            d["R_s"] = e.rate_s;
            d["R"] = e.rate;
            d["pss"] = py::make_tuple(e.pss_n, e.pss_e, e.pss_s);
            return d;
        },
        py::arg("m"), py::arg("p_ee"), py::arg("p_ne"), py::arg("w"), py::arg("r_p") = 1.0, py::arg("r_s") = 1.0);

    m.def(
        "greedy_burst_length",
        [](double p_ee, double p_ne, double w, double r_p, double r_s) {
            return burst_to_py(greedy_burst_length(m_params(p_ee, p_ne, w, r_p, r_s)));
        },
        py::arg("p_ee"), py::arg("p_ne"), py::arg("w"), py::arg("r_p") = 1.0, py::arg("r_s") = 1.0);

    m.def(
        "rate_region",
        [](std::vector<std::uint64_t> m_list, double p_ee, double p_ne, double r_p, double r_s) {
            const RateRegion r = rate_region(m_params(p_ee, p_ne, 0.5, r_p, r_s), m_list);
            py::list points;
            for (const auto& p : r.points)
                points.append(py::make_tuple(p.m, p.rate_p, p.rate_s));
            py::dict d;
            d["points"] = points;
            d["frontier"] = r.frontier;
            return d;
        },
        py::arg("m_list"), py::arg("p_ee"), py::arg("p_ne"), py::arg("r_p") = 1.0, py::arg("r_s") = 1.0);

    py::class_<ValueGrid, std::shared_ptr<ValueGrid>>(m, "ValueGrid")
        .def_property_readonly("problem", [](const ValueGrid& g) { return std::string(to_string(g.problem)); })
        .def_property_readonly("values", [](const ValueGrid& g) { return g.values; })
        .def_property_readonly("actions",
                               [](const ValueGrid& g) {
                                   std::vector<std::string> out;
                                   for (std::size_t i = 0; i < g.actions.size(); ++i)
                                       out.emplace_back(to_string(g.action(i)));
                                   return out;
                               })
        .def_property_readonly("points",
                               [](const ValueGrid& g) {
                                   std::vector<std::pair<double, double>> out;
                                   for (std::size_t i = 0; i < g.grid.size(); ++i)
                                       out.emplace_back(g.point(i).x, g.point(i).y);
                                   return out;
                               })
        .def_property_readonly("iterations", [](const ValueGrid& g) { return g.diagnostics.iterations; })
        .def_property_readonly("bellman_residual", [](const ValueGrid& g) { return g.diagnostics.bellman_residual; })
        .def("value_at", [](const ValueGrid& g, double x, double y) { return g.value_at(GridPoint{x, y}); },
             py::arg("x"), py::arg("y") = 0.0)
        .def("to_json", [](const ValueGrid& g) { return value_grid_to_json(g, Json::object()).dump(); });

    m.def(
        "solve",
        [](std::vector<ChannelModel> models, double w, double alpha, double r_s, std::size_t resolution,
           double tolerance) {
            SolverParams p;
            p.w = w;
            p.alpha = alpha;
            p.r_s = r_s;
            p.grid_resolution = resolution;
            p.tolerance = tolerance;
            py::gil_scoped_release release;
            return std::make_shared<ValueGrid>(solve_problem(models, p));
        },
        py::arg("models"), py::arg("w"), py::arg("alpha") = 0.999, py::arg("r_s") = 1.0, py::arg("resolution") = 0,
        py::arg("tolerance") = 1e-10);

    m.def(
        "threshold",
        [](const ValueGrid& grid, const ChannelModel& model, double w, double r_s) {
            SolverParams p;
            p.w = w;
            p.r_s = r_s;
            return py::module_::import("json").attr("loads")(threshold_to_json(extract_threshold(grid, p, model)).dump());
        },
        py::arg("grid"), py::arg("model"), py::arg("w"), py::arg("r_s") = 1.0,
        "Listen-to-transmit switch of a one-dimensional policy with its analytic brackets.");

    m.def(
        "simulate",
        [](std::vector<ChannelModel> models, const std::string& policy, double w, std::size_t horizon,
           std::size_t replications, std::uint64_t seed, std::optional<std::uint64_t> burst,
           std::shared_ptr<ValueGrid> grid, double r_s, std::size_t threads) {
            SimConfig c;
            c.models = std::move(models);
            c.w = w;
            c.r_s = r_s;
            c.horizon = horizon;
            c.replications = replications;
            c.seed = seed;
            c.threads = threads;
            PolicySpec spec;
            spec.kind = parse_policy_kind(policy);
            if (spec.kind == PolicyKind::MPolicy)
                spec.m = burst ? BurstLength::finite(*burst) : BurstLength::infinite();
            spec.grid = std::move(grid);
            RunStats s;
            {
                py::gil_scoped_release release;
                s = simulate(c, spec);
            }
            return stats_to_dict(s);
        },
        py::arg("models"), py::arg("policy"), py::arg("w"), py::arg("horizon") = 100000,
        py::arg("replications") = 4, py::arg("seed") = 1, py::arg("m") = py::none(), py::arg("grid") = nullptr,
        py::arg("r_s") = 1.0, py::arg("threads") = 0,
        "Monte Carlo throughput of a policy. For 'mpolicy', m=None means transmit forever.");

    m.def(
        "generate_feedback",
        [](const ChannelModel& model, std::size_t length, std::uint64_t seed, bool transmitting) {
            RandomStream rng(seed);
            const ObservationSequence obs = generate_observations(
                model, transmitting ? Regime::Transmitting : Regime::Silent, length, rng);
            std::string out;
            for (Feedback f : obs.symbols)
                out.push_back(f == Feedback::Ack ? 'A' : 'N');
            return out;
        },
        py::arg("model"), py::arg("length"), py::arg("seed") = 1, py::arg("transmitting") = false,
        "Feedback string over {A, N} overheard from the channel.");

    m.def(
        "fit_transitions",
        [](const std::string& symbols, const ChannelModel& model, std::uint64_t seed, std::size_t starts,
           bool transmitting) {
            const ObservationSequence obs =
                parse_symbols(symbols, transmitting ? Regime::Transmitting : Regime::Silent);
            const HmmFit fit = fit_transitions(obs, HmmSpec::from_model(model), seed, starts);
            py::dict d;
            d["transitions"] = fit.transitions;
            d["log_likelihood"] = fit.log_likelihood;
            d["iterations"] = fit.iterations;
            d["converged"] = fit.converged;
            d["error"] = aligned_error(fit.transitions, model.transitions().rows(), HmmSpec::from_model(model));
            return d;
        },
        py::arg("symbols"), py::arg("model"), py::arg("seed") = 1, py::arg("starts") = 4,
        py::arg("transmitting") = false,
        "Baum-Welch estimate of the transition matrix, with emissions taken from `model`. The "
        "returned error is against model's own transitions.");
}
