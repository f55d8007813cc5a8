#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dphmm/harness.hpp"
#include "dphmm/model_io.hpp"

namespace py = pybind11;
using namespace dphmm;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Differentially private release of per-step query answers over a "
      "hidden Markov model";

  py::register_exception<InvalidBeliefError>(m, "InvalidBeliefError",
                                             PyExc_ValueError);
  py::register_exception<ImpossibleObservationError>(
      m, "ImpossibleObservationError", PyExc_ValueError);
  py::register_exception<CannotProtectError>(m, "CannotProtectError",
                                             PyExc_RuntimeError);
  py::register_exception<ModelInconsistencyError>(m, "ModelInconsistencyError",
                                                  PyExc_RuntimeError);
  py::register_exception<UnsupportedDimensionError>(
      m, "UnsupportedDimensionError", PyExc_ValueError);

  py::enum_<BeliefKind>(m, "BeliefKind")
      .value("PRIOR", BeliefKind::kPrior)
      .value("POSTERIOR", BeliefKind::kPosterior);

  py::class_<BeliefState>(m, "BeliefState")
      .def(py::init<>())
      .def(py::init([](std::vector<double> probs, BeliefKind kind, int t) {
             return BeliefState{std::move(probs), kind, t};
           }),
           py::arg("probs"), py::arg("kind") = BeliefKind::kPosterior,
           py::arg("timestamp") = 0)
      .def_readwrite("probs", &BeliefState::probs)
      .def_readwrite("kind", &BeliefState::kind)
      .def_readwrite("timestamp", &BeliefState::timestamp);

  py::class_<MarkovModel>(m, "MarkovModel")
      .def(py::init<>())
      .def(py::init<std::vector<std::vector<double>>>(), py::arg("transition"))
      .def_property_readonly("n_states", &MarkovModel::n_states)
      .def_property_readonly("transition", &MarkovModel::transition)
      .def("at", &MarkovModel::at, py::arg("i"), py::arg("j"));

  py::class_<MeasurementQuery>(m, "MeasurementQuery")
      .def(py::init<>())
      .def(py::init<std::vector<std::vector<double>>>(), py::arg("rows"))
      .def_property_readonly("dim", &MeasurementQuery::dim)
      .def_property_readonly("n_states", &MeasurementQuery::n_states)
      .def("answer", &MeasurementQuery::answer, py::arg("state"))
      .def_property_readonly("columns", &MeasurementQuery::columns)
      .def("rows", &MeasurementQuery::rows);

  m.def("propagate", &propagate, py::arg("belief"), py::arg("model"));
  m.def("extract_constraint", &extract_constraint, py::arg("prior"));
  m.def("posterior_update", &posterior_update, py::arg("prior"),
        py::arg("likelihood"));
  m.def("learn_model", &learn_model, py::arg("trajectories"),
        py::arg("n_states"), py::arg("smoothing"));

  py::enum_<PolicyKind>(m, "PolicyKind")
      .value("COMPLETE", PolicyKind::kComplete)
      .value("CATEGORICAL", PolicyKind::kCategorical)
      .value("UTILITY", PolicyKind::kUtility)
      .value("TRANSITION", PolicyKind::kTransition);

  py::class_<GraphSpec>(m, "GraphSpec")
      .def(py::init<>())
      .def(py::init([](PolicyKind kind, std::vector<int> categories,
                       double radius) {
             return GraphSpec{kind, std::move(categories), radius};
           }),
           py::arg("kind"), py::arg("categories") = std::vector<int>{},
           py::arg("radius") = 0.0)
      .def_readwrite("kind", &GraphSpec::kind)
      .def_readwrite("categories", &GraphSpec::categories)
      .def_readwrite("radius", &GraphSpec::radius);

  py::class_<PolicyGraph>(m, "PolicyGraph")
      .def(py::init<>())
      .def(py::init<int>(), py::arg("n_states"))
      .def(py::init<int, const std::vector<Edge>&>(), py::arg("n_states"),
           py::arg("edges"))
      .def_property_readonly("n_states", &PolicyGraph::n_states)
      .def_property_readonly("edges",
                             [](const PolicyGraph& g) {
                               return std::vector<Edge>(g.edges().begin(),
                                                        g.edges().end());
                             })
      .def_property_readonly("edge_count", &PolicyGraph::edge_count)
      .def("has_edge", &PolicyGraph::has_edge, py::arg("a"), py::arg("b"))
      .def("add_edge", &PolicyGraph::add_edge, py::arg("a"), py::arg("b"));

  m.def("build_policy", &build_policy, py::arg("spec"), py::arg("n_states"),
        py::arg("query") = static_cast<const MeasurementQuery*>(nullptr),
        py::arg("model") = static_cast<const MarkovModel*>(nullptr));
  m.def("restricted", &restricted, py::arg("graph"), py::arg("constraint"));

  py::class_<DiffProvenance>(m, "DiffProvenance")
      .def_readonly("edge", &DiffProvenance::edge)
      .def_readonly("sign", &DiffProvenance::sign);

  py::class_<DifferenceSet>(m, "DifferenceSet")
      .def_readonly("dim", &DifferenceSet::dim)
      .def_readonly("columns", &DifferenceSet::columns)
      .def_readonly("provenance", &DifferenceSet::provenance);

  py::class_<Polytope>(m, "Polytope")
      .def_readonly("dim", &Polytope::dim)
      .def_readonly("intrinsic_dim", &Polytope::intrinsic_dim)
      .def_readonly("vertices", &Polytope::vertices)
      .def_readonly("generators", &Polytope::generators);

  m.def("difference_set", &difference_set, py::arg("graph"), py::arg("query"));
  m.def("sensitivity_hull", &sensitivity_hull, py::arg("diffs"));
  m.def("hull_of_points", &hull_of_points, py::arg("points"), py::arg("dim"));
  m.def("k_norm", &k_norm, py::arg("polytope"), py::arg("v"));
  m.def("contains",
        py::overload_cast<const Polytope&, const Vec&>(&contains),
        py::arg("polytope"), py::arg("v"));
  m.def("contains",
        py::overload_cast<const DifferenceSet&, const Vec&>(&contains),
        py::arg("diffs"), py::arg("v"));
  m.def("hull_measure", &hull_measure, py::arg("polytope"));
  m.def("sample_uniform", &sample_uniform, py::arg("polytope"), py::arg("rng"));
  m.def("cross_polytope", &cross_polytope, py::arg("radius"), py::arg("dim"));

  py::class_<ProtectionReport>(m, "ProtectionReport")
      .def_readonly("constraint", &ProtectionReport::constraint)
      .def_readonly("dop", &ProtectionReport::dop)
      .def_readonly("exposed", &ProtectionReport::exposed)
      .def_readonly("protectable", &ProtectionReport::protectable);

  m.def("degree_of_protection", &degree_of_protection, py::arg("state"),
        py::arg("diffs"), py::arg("constraint"), py::arg("query"));
  m.def("protection_report", &protection_report, py::arg("graph"),
        py::arg("constraint"), py::arg("query"));
  m.def("greedy_repair", &greedy_repair, py::arg("graph"),
        py::arg("constraint"), py::arg("query"));
  m.def("min_repair_2d", &min_repair_2d, py::arg("graph"),
        py::arg("constraint"), py::arg("query"));

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("derive", &RandomStream::derive, py::arg("seed"),
                  py::arg("stream_id"))
      .def("uniform", &RandomStream::uniform)
      .def("exponential", &RandomStream::exponential, py::arg("rate"))
      .def("gamma_integer", &RandomStream::gamma_integer, py::arg("shape"),
           py::arg("rate"))
      .def("laplace_unit", &RandomStream::laplace_unit)
      .def("below", &RandomStream::below, py::arg("n"));
  m.def("splitmix64", &splitmix64, py::arg("x"));

  py::enum_<MechanismKind>(m, "MechanismKind")
      .value("KNORM", MechanismKind::kKNorm)
      .value("LAPLACE", MechanismKind::kLaplace);

  py::class_<MechanismConfig>(m, "MechanismConfig")
      .def(py::init<>())
      .def(py::init([](MechanismKind kind, double epsilon) {
             return MechanismConfig{kind, epsilon};
           }),
           py::arg("kind") = MechanismKind::kKNorm, py::arg("epsilon") = 1.0)
      .def_readwrite("kind", &MechanismConfig::kind)
      .def_readwrite("epsilon", &MechanismConfig::epsilon);

  py::class_<NoisyAnswer>(m, "NoisyAnswer")
      .def_readonly("z", &NoisyAnswer::z)
      .def_readonly("timestamp", &NoisyAnswer::timestamp)
      .def_readonly("epsilon_spent", &NoisyAnswer::epsilon_spent)
      .def_readonly("exact", &NoisyAnswer::exact)
      .def_readonly("radial", &NoisyAnswer::radial)
      .def_readonly("hull_used", &NoisyAnswer::hull_used);

  m.def("l1_sensitivity", &l1_sensitivity, py::arg("graph"), py::arg("query"));
  m.def("knorm_sample", &knorm_sample, py::arg("true_answer"), py::arg("hull"),
        py::arg("epsilon"), py::arg("rng"), py::arg("timestamp") = 0);
  m.def("knorm_density", &knorm_density, py::arg("z"), py::arg("true_answer"),
        py::arg("hull"), py::arg("epsilon"));
  m.def("laplace_sample", &laplace_sample, py::arg("true_answer"),
        py::arg("s_f"), py::arg("epsilon"), py::arg("rng"),
        py::arg("timestamp") = 0);
  m.def("laplace_density", &laplace_density, py::arg("z"),
        py::arg("true_answer"), py::arg("s_f"), py::arg("epsilon"));

  py::enum_<RepairKind>(m, "RepairKind")
      .value("GREEDY", RepairKind::kGreedy)
      .value("MIN2D", RepairKind::kMin2d);

  py::class_<LedgerRecord>(m, "LedgerRecord")
      .def_readonly("timestamp", &LedgerRecord::timestamp)
      .def_readonly("epsilon", &LedgerRecord::epsilon)
      .def_readonly("factor", &LedgerRecord::factor)
      .def_readonly("dop_true_state", &LedgerRecord::dop_true_state)
      .def_readonly("error_l2", &LedgerRecord::error_l2)
      .def_readonly("singleton", &LedgerRecord::singleton)
      .def_readonly("repaired_edges", &LedgerRecord::repaired_edges)
      .def_readonly("z", &LedgerRecord::z);

  py::class_<PrivacyLedger>(m, "PrivacyLedger")
      .def(py::init<>())
      .def_readonly("records", &PrivacyLedger::records);

  py::class_<ComposeEntry>(m, "ComposeEntry")
      .def_readonly("timestamp", &ComposeEntry::timestamp)
      .def_readonly("epsilon", &ComposeEntry::epsilon)
      .def_readonly("constrained", &ComposeEntry::constrained);

  py::class_<ComposeSummary>(m, "ComposeSummary")
      .def_readonly("dphmm_total", &ComposeSummary::dphmm_total)
      .def_readonly("constrained_total", &ComposeSummary::constrained_total)
      .def_readonly("per_timestamp", &ComposeSummary::per_timestamp);

  m.def("compose", &compose, py::arg("ledger"));
  m.def("constrained_dp_factor", &constrained_dp_factor, py::arg("constraint"),
        py::arg("query"), py::arg("hull"));

  py::class_<AuditResult>(m, "AuditResult")
      .def_readonly("epsilon", &AuditResult::epsilon)
      .def_readonly("factors", &AuditResult::factors)
      .def_readonly("levels", &AuditResult::levels)
      .def_readonly("overall", &AuditResult::overall);

  m.def("audit_blowfish_database", &audit_blowfish_database,
        py::arg("per_secret_diffs"), py::arg("hull"), py::arg("epsilon"));

  py::class_<ReleaseSession>(m, "ReleaseSession")
      .def(py::init<MarkovModel, MeasurementQuery, PolicyGraph,
                    MechanismConfig, RepairKind, BeliefState, std::uint64_t>(),
           py::arg("model"), py::arg("query"), py::arg("base_graph"),
           py::arg("mechanism"), py::arg("repair"), py::arg("initial_belief"),
           py::arg("stream_seed"))
      .def("step", py::overload_cast<int>(&ReleaseSession::step),
           py::arg("true_state"))
      .def("step", py::overload_cast<int, double>(&ReleaseSession::step),
           py::arg("true_state"), py::arg("epsilon_t"))
      .def_property_readonly("belief", &ReleaseSession::belief)
      .def_property_readonly("ledger", &ReleaseSession::ledger)
      .def_property_readonly("timestamp", &ReleaseSession::timestamp);

  py::class_<GridWorld>(m, "GridWorld")
      .def(py::init<>())
      .def_readwrite("side", &GridWorld::side)
      .def_readwrite("model", &GridWorld::model)
      .def_readwrite("query", &GridWorld::query)
      .def_readwrite("trajectories", &GridWorld::trajectories);

  m.def("generate_grid_world", &generate_grid_world, py::arg("side"),
        py::arg("seed"), py::arg("n_trajectories"), py::arg("timesteps"));
  m.def("sample_trajectories", &sample_trajectories, py::arg("model"),
        py::arg("seed"), py::arg("n_trajectories"), py::arg("timesteps"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("side", &ExperimentConfig::side)
      .def_readwrite("timesteps", &ExperimentConfig::timesteps)
      .def_readwrite("n_trajectories", &ExperimentConfig::n_trajectories)
      .def_readwrite("policies", &ExperimentConfig::policies)
      .def_readwrite("epsilons", &ExperimentConfig::epsilons)
      .def_readwrite("mechanism", &ExperimentConfig::mechanism)
      .def_readwrite("repair", &ExperimentConfig::repair)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("timing", &ExperimentConfig::timing)
      .def_readwrite("threads", &ExperimentConfig::threads);

  py::class_<MetricsRow>(m, "MetricsRow")
      .def(py::init<>())
      .def_readwrite("trajectory", &MetricsRow::trajectory)
      .def_readwrite("t", &MetricsRow::t)
      .def_readwrite("dop", &MetricsRow::dop)
      .def_readwrite("error", &MetricsRow::error)
      .def_readwrite("epsilon", &MetricsRow::epsilon)
      .def_readwrite("factor", &MetricsRow::factor)
      .def_readwrite("runtime_ms", &MetricsRow::runtime_ms);

  py::class_<CellResult>(m, "CellResult")
      .def_readonly("policy", &CellResult::policy)
      .def_readonly("policy_label", &CellResult::policy_label)
      .def_readonly("epsilon", &CellResult::epsilon)
      .def_readonly("rows", &CellResult::rows)
      .def_readonly("mean_dop", &CellResult::mean_dop)
      .def_readonly("rms_error", &CellResult::rms_error)
      .def_readonly("mean_runtime_ms", &CellResult::mean_runtime_ms)
      .def_readonly("failed", &CellResult::failed)
      .def_readonly("error", &CellResult::error);

  m.def("run_experiment",
        py::overload_cast<const ExperimentConfig&>(&run_experiment),
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_experiment",
        py::overload_cast<const ExperimentConfig&, const GridWorld&>(
            &run_experiment),
        py::arg("config"), py::arg("world"),
        py::call_guard<py::gil_scoped_release>());

  py::enum_<MetricsFormat>(m, "MetricsFormat")
      .value("CSV", MetricsFormat::kCsv)
      .value("JSONL", MetricsFormat::kJsonl);

  m.def("write_metrics", &write_metrics, py::arg("rows"), py::arg("path"),
        py::arg("format"));
  m.def("read_metrics", &read_metrics, py::arg("path"), py::arg("format"));
  m.def("moving_average", &moving_average, py::arg("values"),
        py::arg("window"));
  m.def("policy_label", &policy_label, py::arg("spec"));

  py::class_<ModelFile>(m, "ModelFile")
      .def_readonly("model", &ModelFile::model)
      .def_readonly("policy", &ModelFile::policy)
      .def_readonly("query", &ModelFile::query);

  m.def("load_model_file", &load_model_file, py::arg("path"));
  m.def("load_trajectories", &load_trajectories, py::arg("path"),
        py::arg("n_states"));
  m.def("save_trajectories", &save_trajectories, py::arg("trajectories"),
        py::arg("path"));
  m.def("parse_policy_string", &parse_policy_string, py::arg("text"));
  m.def("ledger_record_json", &ledger_record_json, py::arg("record"));
  m.def("ledger_json", &ledger_json, py::arg("ledger"));
}
