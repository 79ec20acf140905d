// Python bindings for the scenario-level entry points. Configuration
// objects are mutable; results come back as read-only records.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coopsim/config_io.hpp"
#include "coopsim/pricing.hpp"
#include "coopsim/sim.hpp"
#include "coopsim/traffic.hpp"

namespace py = pybind11;
using namespace coopsim;

PYBIND11_MODULE(_coopsim, m) {
  m.doc() = "cooperative uplink video scheduling: episodes, sweeps, pricing";

  py::class_<PhyConfig>(m, "PhyConfig")
      .def(py::init<>())
      .def_readwrite("symbol_rate", &PhyConfig::symbol_rate)
      .def_readwrite("avg_snr", &PhyConfig::avg_snr)
      .def_readwrite("bep_target", &PhyConfig::bep_target)
      .def_readwrite("bep_split", &PhyConfig::bep_split)
      .def_readwrite("max_bits_per_symbol", &PhyConfig::max_bits_per_symbol)
      .def_readwrite("base_bits_per_symbol", &PhyConfig::base_bits_per_symbol)
      .def_readwrite("packet_bits", &PhyConfig::packet_bits)
      .def_readwrite("slot_seconds", &PhyConfig::slot_seconds)
      .def_readwrite("symbol_energy", &PhyConfig::symbol_energy)
      .def("validate", &PhyConfig::validate);

  py::class_<CoopConfig>(m, "CoopConfig")
      .def(py::init<>())
      .def_readwrite("stbc_length", &CoopConfig::stbc_length)
      .def_readwrite("stbc_rate", &CoopConfig::stbc_rate)
      .def_readwrite("self_select_xi", &CoopConfig::self_select_xi)
      .def("validate", &CoopConfig::validate);

  py::class_<FrameClass>(m, "FrameClass")
      .def(py::init<>())
      .def_readwrite("packets", &FrameClass::packets)
      .def_readwrite("quality", &FrameClass::quality)
      .def_readwrite("deadline_offset", &FrameClass::deadline_offset);

  py::class_<DependencyEdge>(m, "DependencyEdge")
      .def(py::init<>())
      .def_readwrite("from_class", &DependencyEdge::from_class)
      .def_readwrite("gop_delta", &DependencyEdge::gop_delta)
      .def_readwrite("to_class", &DependencyEdge::to_class);

  py::class_<GopSpec>(m, "GopSpec")
      .def(py::init<>())
      .def_readwrite("period", &GopSpec::period)
      .def_readwrite("window", &GopSpec::window)
      .def_readwrite("classes", &GopSpec::classes)
      .def_readwrite("deps", &GopSpec::deps)
      .def("validate", &GopSpec::validate)
      .def_static("default_ibpb", &GopSpec::default_ibpb,
                  py::arg("packets_per_frame") = 4);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("phy", &ScenarioConfig::phy)
      .def_readwrite("coop", &ScenarioConfig::coop)
      .def_readwrite("gop", &ScenarioConfig::gop)
      .def_readwrite("n_users", &ScenarioConfig::n_users)
      .def_readwrite("n_relays", &ScenarioConfig::n_relays)
      .def_readwrite("coverage_radius", &ScenarioConfig::coverage_radius)
      .def_readwrite("path_loss_exponent", &ScenarioConfig::path_loss_exponent)
      .def_readwrite("user_distances", &ScenarioConfig::user_distances)
      .def_readwrite("coop_enabled", &ScenarioConfig::coop_enabled)
      .def_readwrite("apply_packet_errors", &ScenarioConfig::apply_packet_errors)
      .def_readwrite("reoptimize_on_cut", &ScenarioConfig::reoptimize_on_cut)
      .def_readwrite("alpha", &ScenarioConfig::alpha)
      .def_readwrite("optimize_price", &ScenarioConfig::optimize_price)
      .def_readwrite("fixed_lambda", &ScenarioConfig::fixed_lambda)
      .def_readwrite("mu0", &ScenarioConfig::mu0)
      .def_readwrite("price_max_iter", &ScenarioConfig::price_max_iter)
      .def_readwrite("price_tol", &ScenarioConfig::price_tol)
      .def_readwrite("pmf_samples", &ScenarioConfig::pmf_samples)
      .def_readwrite("packets_per_frame", &ScenarioConfig::packets_per_frame)
      .def_readwrite("slots", &ScenarioConfig::slots)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def("validate", &ScenarioConfig::validate);

  py::class_<UserStats>(m, "UserStats")
      .def_readonly("slots", &UserStats::slots)
      .def_readonly("coop_slots", &UserStats::coop_slots)
      .def_readonly("direct_slots", &UserStats::direct_slots)
      .def_readonly("idle_slots", &UserStats::idle_slots)
      .def_readonly("blocked_slots", &UserStats::blocked_slots)
      .def_readonly("sent_packets", &UserStats::sent_packets)
      .def_readonly("delivered_packets", &UserStats::delivered_packets)
      .def_readonly("admitted_packets", &UserStats::admitted_packets)
      .def_readonly("expired_packets", &UserStats::expired_packets)
      .def_readonly("dropped_packets", &UserStats::dropped_packets)
      .def_readonly("completed_frames", &UserStats::completed_frames)
      .def_readonly("undecodable_frames", &UserStats::undecodable_frames)
      .def_readonly("realized_utility", &UserStats::realized_utility)
      .def_readonly("energy", &UserStats::energy)
      .def_readonly("airtime", &UserStats::airtime)
      .def_readonly("mean_relay_count", &UserStats::mean_relay_count)
      .def_readonly("expected_airtime", &UserStats::expected_airtime);

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("lambda_star", &SimResult::lambda_star)
      .def_readonly("price_converged", &SimResult::price_converged)
      .def_readonly("sum_expected_airtime", &SimResult::sum_expected_airtime)
      .def_readonly("max_slot_airtime", &SimResult::max_slot_airtime)
      .def_readonly("traffic_states", &SimResult::traffic_states)
      .def_readonly("users", &SimResult::users);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("distance", &SweepRow::distance)
      .def_readonly("xi", &SweepRow::xi)
      .def_readonly("mean_spectral_bits", &SweepRow::mean_spectral_bits)
      .def_readonly("coop_probability", &SweepRow::coop_probability)
      .def_readonly("mean_relay_count", &SweepRow::mean_relay_count)
      .def_readonly("mean_energy_per_packet", &SweepRow::mean_energy_per_packet)
      .def_readonly("throughput_per_energy", &SweepRow::throughput_per_energy)
      .def_readonly("direct_equiv_energy", &SweepRow::direct_equiv_energy);

  py::class_<PriceHistoryEntry>(m, "PriceHistoryEntry")
      .def_readonly("lambda_", &PriceHistoryEntry::lambda)
      .def_readonly("sum_x", &PriceHistoryEntry::sum_x);

  py::class_<PriceResult>(m, "PriceResult")
      .def_readonly("lambda_star", &PriceResult::lambda_star)
      .def_readonly("converged", &PriceResult::converged)
      .def_readonly("final_sum_x", &PriceResult::final_sum_x)
      .def_readonly("history", &PriceResult::history);

  m.def("run_episode", &run_episode, py::arg("config"),
        "simulate one scenario episode",
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep_distance", &sweep_distance, py::arg("config"),
        py::arg("distances"), py::arg("xi_values"),
        "single-source sweep over distance and recruitment threshold",
        py::call_guard<py::gil_scoped_release>());
  m.def("price_scenario", &price_scenario, py::arg("config"),
        "run only the resource price search for a scenario",
        py::call_guard<py::gil_scoped_release>());

  m.def("parse_scenario", &parse_scenario, py::arg("text"),
        "scenario from a JSON string");
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("scenario_to_json", &scenario_to_json, py::arg("config"));
  m.def("episode_csv", &episode_csv, py::arg("result"));
  m.def("sweep_csv", &sweep_csv, py::arg("rows"));
  m.def("price_history_csv", &price_history_csv, py::arg("result"));
}
