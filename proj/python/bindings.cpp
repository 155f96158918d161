// Python bindings for the core operations: kernels, the delay clamp and
// shift, gradients, network training, the synthetic task, checkpoints and the
// CLI verbs. Grid and SpikeRaster expose the buffer protocol, so
// numpy.asarray() views them without copying.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "radsnn/checkpoint.hpp"
#include "radsnn/cli_commands.hpp"
#include "radsnn/config.hpp"
#include "radsnn/gradcheck.hpp"
#include "radsnn/kernels.hpp"
#include "radsnn/network.hpp"
#include "radsnn/rad_delay.hpp"
#include "radsnn/synth.hpp"

namespace py = pybind11;
using namespace radsnn;

namespace {

Grid grid_from_rows(const std::vector<std::vector<double>>& rows) {
  RAD_CHECK(!rows.empty(), "grid needs at least one row");
  Grid g(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    RAD_CHECK(rows[r].size() == g.cols(), "ragged rows in grid literal");
    for (std::size_t c = 0; c < g.cols(); ++c) g.at(r, c) = rows[r][c];
  }
  return g;
}

DelayState make_delay_state(const std::vector<double>& raw, double theta_d) {
  DelayState state = DelayState::zeros(raw.size(), theta_d);
  state.raw = raw;
  state.reclamp();
  return state;
}

KernelKind kind_from_name(const std::string& name) {
  if (name == "response") return KernelKind::kResponse;
  if (name == "refractory") return KernelKind::kRefractory;
  throw Error("unknown kernel kind '" + name + "' (expected response or refractory)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spiking-network training engine with trainable rectified axonal delays";

  // --- kernels ---------------------------------------------------------------
  m.def("eval_response", &eval_response, py::arg("t_ms"), py::arg("tau_s"));
  m.def("eval_refractory", &eval_refractory, py::arg("t_ms"), py::arg("tau_r"),
        py::arg("theta_u"));
  m.def(
      "kernel_table",
      [](const std::string& kind, double tau, double theta_u, double sample_time_ms) {
        return tabulate(kind_from_name(kind), tau, theta_u, sample_time_ms).samples;
      },
      py::arg("kind"), py::arg("tau"), py::arg("theta_u") = 10.0,
      py::arg("sample_time_ms") = 1.0,
      "Sampled kernel over its support window (n-th entry is kernel(n * Ts)).");

  // --- dense containers --------------------------------------------------------
  py::class_<Grid>(m, "Grid", py::buffer_protocol())
      .def(py::init<std::size_t, std::size_t, double>(), py::arg("rows"), py::arg("cols"),
           py::arg("fill") = 0.0)
      .def(py::init(&grid_from_rows), py::arg("rows"))
      .def_property_readonly("rows", &Grid::rows)
      .def_property_readonly("cols", &Grid::cols)
      .def("at",
           [](const Grid& g, std::size_t r, std::size_t c) {
             RAD_CHECK(r < g.rows() && c < g.cols(), "grid index out of range");
             return g.at(r, c);
           })
      .def("set",
           [](Grid& g, std::size_t r, std::size_t c, double v) {
             RAD_CHECK(r < g.rows() && c < g.cols(), "grid index out of range");
             g.at(r, c) = v;
           })
      .def("tolist",
           [](const Grid& g) {
             std::vector<std::vector<double>> rows(g.rows());
             for (std::size_t r = 0; r < g.rows(); ++r)
               rows[r].assign(g.row(r), g.row(r) + g.cols());
             return rows;
           })
      .def_buffer([](Grid& g) {
        return py::buffer_info(g.data().data(), sizeof(double),
                               py::format_descriptor<double>::format(), 2,
                               {g.rows(), g.cols()},
                               {sizeof(double) * g.cols(), sizeof(double)});
      });

  py::class_<SpikeRaster>(m, "SpikeRaster", py::buffer_protocol())
      .def(py::init<std::size_t, std::size_t, double>(), py::arg("neurons"),
           py::arg("steps"), py::arg("sample_time_ms") = 1.0)
      .def_readonly("neurons", &SpikeRaster::neurons)
      .def_readonly("steps", &SpikeRaster::steps)
      .def_readonly("sample_time_ms", &SpikeRaster::sample_time_ms)
      .def("get",
           [](const SpikeRaster& r, std::size_t i, std::size_t n) {
             RAD_CHECK(i < r.neurons && n < r.steps, "raster index out of range");
             return r.get(i, n) != 0;
           })
      .def("set",
           [](SpikeRaster& r, std::size_t i, std::size_t n, bool on) {
             RAD_CHECK(i < r.neurons && n < r.steps, "raster index out of range");
             r.set(i, n, on);
           })
      .def("total_spikes", &SpikeRaster::total_spikes)
      .def("row_spikes",
           [](const SpikeRaster& r, std::size_t i) {
             RAD_CHECK(i < r.neurons, "raster row out of range");
             return r.row_spikes(i);
           })
      .def("__eq__", [](const SpikeRaster& a, const SpikeRaster& b) { return a == b; })
      .def_buffer([](SpikeRaster& r) {
        return py::buffer_info(r.data.data(), sizeof(std::uint8_t),
                               py::format_descriptor<std::uint8_t>::format(), 2,
                               {r.neurons, r.steps},
                               {sizeof(std::uint8_t) * r.steps, sizeof(std::uint8_t)});
      });

  // --- rectified axonal delay ---------------------------------------------------
  m.def("clamp_delay", &clamp_delay, py::arg("d"), py::arg("theta_d"));

  py::class_<DelayState>(m, "DelayState")
      .def(py::init(&make_delay_state), py::arg("raw"), py::arg("theta_d"))
      .def_readonly("raw", &DelayState::raw)
      .def_readonly("clamped", &DelayState::clamped)
      .def_readonly("theta_d", &DelayState::theta_d);

  m.def("shift_spikes", &shift_spikes, py::arg("spikes"), py::arg("delays"));
  m.def("delay_gradient", &delay_gradient, py::arg("shifted"), py::arg("upstream_grad"),
        py::arg("sample_time_ms"),
        "Spike-difference delay-gradient estimator, one value per neuron.");
  m.def("unshift_gradient", &unshift_gradient, py::arg("upstream_grad"), py::arg("delays"),
        py::arg("sample_time_ms"));

  // --- events and datasets -------------------------------------------------------
  py::class_<EventStream>(m, "EventStream")
      .def_readonly("channel_count", &EventStream::channel_count)
      .def_readonly("duration_ms", &EventStream::duration_ms)
      .def_readonly("label", &EventStream::label)
      .def_readwrite("split_polarity", &EventStream::split_polarity)
      .def_property_readonly("event_count",
                             [](const EventStream& s) { return s.events.size(); });

  m.def(
      "load_events",
      [](const std::string& path, const std::string& format) {
        return load_events(path, format == "csv" ? EventFormat::kCsv
                                                 : EventFormat::kCanonicalBinary);
      },
      py::arg("path"), py::arg("format") = "canonical");
  m.def("write_events", &write_events, py::arg("stream"), py::arg("path"));
  m.def("rasterize", &rasterize, py::arg("stream"), py::arg("sample_time_ms") = 1.0);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("samples", &Dataset::samples)
      .def_readonly("labels", &Dataset::labels)
      .def("__len__", &Dataset::size);

  py::class_<SynthParams>(m, "SynthParams")
      .def(py::init<>())
      .def_readwrite("class_count", &SynthParams::class_count)
      .def_readwrite("channel_count", &SynthParams::channel_count)
      .def_readwrite("samples_per_class", &SynthParams::samples_per_class)
      .def_readwrite("duration_ms", &SynthParams::duration_ms)
      .def_readwrite("spikes_per_channel", &SynthParams::spikes_per_channel)
      .def_readwrite("anchor_start_ms", &SynthParams::anchor_start_ms)
      .def_readwrite("anchor_gap_ms", &SynthParams::anchor_gap_ms)
      .def_readwrite("micro_offset_span_ms", &SynthParams::micro_offset_span_ms)
      .def_readwrite("jitter_ms", &SynthParams::jitter_ms);

  m.def(
      "synth_dataset",
      [](const SynthParams& params, std::uint64_t seed, double sample_time_ms) {
        return rasterize_all(synth_temporal_task(params, seed), sample_time_ms, false);
      },
      py::arg("params"), py::arg("seed"), py::arg("sample_time_ms") = 1.0,
      "Rasterized synthetic timing task (classes differ only in spike timing).");

  // --- network, training, evaluation ----------------------------------------------
  py::class_<SurrogateConfig>(m, "SurrogateConfig")
      .def_readwrite("scale", &SurrogateConfig::scale)
      .def_readwrite("sharpness", &SurrogateConfig::sharpness);

  py::class_<NetworkSpec>(m, "NetworkSpec")
      .def(py::init<>())
      .def_readwrite("layer_sizes", &NetworkSpec::layer_sizes)
      .def_readwrite("delays_enabled", &NetworkSpec::delays_enabled)
      .def_readwrite("theta_d_ms", &NetworkSpec::theta_d_ms)
      .def_readwrite("theta_u", &NetworkSpec::theta_u)
      .def_readwrite("sample_time_ms", &NetworkSpec::sample_time_ms)
      .def_readwrite("tau_s_ms", &NetworkSpec::tau_s_ms)
      .def_readwrite("tau_r_ms", &NetworkSpec::tau_r_ms)
      .def_readwrite("init_rate", &NetworkSpec::init_rate)
      .def_readwrite("seed", &NetworkSpec::seed)
      .def("validate", &NetworkSpec::validate)
      .def("weight_param_count", &NetworkSpec::weight_param_count)
      .def("delay_param_count", &NetworkSpec::delay_param_count);

  py::class_<Network>(m, "Network")
      .def_property_readonly("spec", [](const Network& n) { return n.spec; })
      .def("forward", &network_output, py::arg("input"),
           "Hard forward pass; returns the output spike raster.")
      .def(
          "delays",
          [](const Network& net, std::size_t layer) {
            RAD_CHECK(layer < net.layers.size(), "layer index out of range");
            return net.layers[layer].delay.clamped;
          },
          py::arg("layer"), "Clamped per-neuron delays of one layer (empty when none).")
      .def(
          "weights",
          [](const Network& net, std::size_t layer) {
            RAD_CHECK(layer < net.layers.size(), "layer index out of range");
            return net.layers[layer].weights;
          },
          py::arg("layer"));

  m.def("build_network", &build_network, py::arg("spec"));

  py::class_<CumulativeTrace>(m, "CumulativeTrace")
      .def_readonly("counts", &CumulativeTrace::counts)
      .def_readonly("sample_time_ms", &CumulativeTrace::sample_time_ms)
      .def_readonly("decision_time_ms", &CumulativeTrace::decision_time_ms);

  m.def("cumulative_trace", &cumulative_trace, py::arg("net"), py::arg("sample"),
        "Running per-class output spike totals and the decision time.");

  py::class_<TargetSpec>(m, "TargetSpec")
      .def(py::init<>())
      .def_readwrite("true_class_count", &TargetSpec::true_class_count)
      .def_readwrite("false_class_count", &TargetSpec::false_class_count)
      .def_readwrite("window_steps", &TargetSpec::window_steps);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_property(
          "rule", [](const OptimizerConfig& c) { return to_string(c.rule); },
          [](OptimizerConfig& c, const std::string& name) { c.rule = rule_from_string(name); })
      .def_readwrite("learning_rate_weights", &OptimizerConfig::learning_rate_weights)
      .def_readwrite("learning_rate_delays", &OptimizerConfig::learning_rate_delays)
      .def_readwrite("beta1", &OptimizerConfig::beta1)
      .def_readwrite("beta2", &OptimizerConfig::beta2)
      .def_readwrite("epsilon", &OptimizerConfig::epsilon)
      .def_readwrite("seed", &OptimizerConfig::seed);

  py::class_<Optimizer>(m, "Optimizer").def(py::init<OptimizerConfig>(), py::arg("config"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("optimizer", &TrainConfig::optimizer)
      .def_readwrite("target", &TrainConfig::target)
      .def_readwrite("delay_update_direction", &TrainConfig::delay_update_direction);

  py::class_<EpochRow>(m, "EpochRow")
      .def_readonly("epoch", &EpochRow::epoch)
      .def_readonly("train_loss", &EpochRow::train_loss)
      .def_readonly("train_accuracy", &EpochRow::train_accuracy)
      .def_readonly("test_loss", &EpochRow::test_loss)
      .def_readonly("test_accuracy", &EpochRow::test_accuracy);

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("epochs", &TrainReport::epochs)
      .def_readonly("weight_params", &TrainReport::weight_params)
      .def_readonly("delay_params", &TrainReport::delay_params)
      .def_readonly("wall_clock_seconds", &TrainReport::wall_clock_seconds);

  py::class_<Evaluation>(m, "Evaluation")
      .def_readonly("accuracy", &Evaluation::accuracy)
      .def_readonly("mean_loss", &Evaluation::mean_loss)
      .def_readonly("confusion", &Evaluation::confusion)
      .def_readonly("no_spike_count", &Evaluation::no_spike_count);

  m.def("run_training", &run_training, py::arg("net"), py::arg("optimizer"),
        py::arg("train"), py::arg("test"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("evaluate", &evaluate, py::arg("net"), py::arg("data"), py::arg("target"),
        py::call_guard<py::gil_scoped_release>());

  // --- checkpoints ------------------------------------------------------------------
  py::class_<Checkpoint>(m, "Checkpoint")
      .def_property_readonly("network", [](const Checkpoint& c) { return c.network; })
      .def("make_optimizer", &Checkpoint::make_optimizer);

  m.def("save_checkpoint", &save_checkpoint, py::arg("net"), py::arg("optimizer"),
        py::arg("path"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  // --- gradcheck oracle ----------------------------------------------------------
  m.def("smoothed_loss", &smoothed_loss, py::arg("net"), py::arg("sample"), py::arg("label"),
        py::arg("target"), py::arg("sharpness"),
        "Loss of the smoothed relaxation (sigmoid threshold, fractional shift).");
  m.def(
      "grad_check",
      [](const Network& net, const SpikeRaster& sample, std::size_t label,
         const TargetSpec& target, double sharpness, double h, double tolerance) {
        const GradCheckReport r = grad_check(net, sample, label, target, sharpness, h,
                                             tolerance);
        py::dict d;
        d["h"] = r.h;
        d["max_rel_error_weights"] = r.max_rel_error_weights;
        d["worst_weight"] = r.worst_weight;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("net"), py::arg("sample"), py::arg("label"), py::arg("target"),
      py::arg("sharpness"), py::arg("h"), py::arg("tolerance") = 1e-4);

  // --- configuration and CLI verbs -------------------------------------------------
  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("profile", &RunConfig::profile)
      .def_readwrite("hidden_sizes", &RunConfig::hidden_sizes)
      .def_readwrite("network", &RunConfig::network)
      .def_readwrite("train", &RunConfig::train)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("trials", &RunConfig::trials)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("ablate_theta_d", &RunConfig::ablate_theta_d)
      .def("validate", &RunConfig::validate);

  m.def("default_config", &default_config);
  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        py::arg("origin") = "<string>");
  m.def("effective_config_json", &effective_config_json, py::arg("config"));
  m.def("apply_profile", &apply_profile, py::arg("config"), py::arg("name"));

  m.def("cmd_train", &cmd_train, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("cmd_ablate", &cmd_ablate, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("cmd_eval", &cmd_eval, py::arg("config"), py::arg("checkpoint_path"),
        py::call_guard<py::gil_scoped_release>());
  m.def("cmd_analyze", &cmd_analyze, py::arg("config"), py::arg("checkpoint_path"),
        py::arg("sample_path"), py::call_guard<py::gil_scoped_release>());
  m.def("cmd_gradcheck", &cmd_gradcheck, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("cmd_synth", &cmd_synth, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
