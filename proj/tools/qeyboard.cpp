// Copyright 2026 The Qeyboard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qeyboard render | ising | serve
//
// Exit codes: 0 success, 2 usage, 3 input error, 4 runtime failure.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qeyboard/qeyboard.hpp"
#include "qeyboard/service/server.hpp"

namespace fs = std::filesystem;
using namespace qeyboard;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitRuntime = 4;

/// Bad user input that is not a parse error (missing file, bad flag value).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + p.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to " + p.string() + " failed");
    }
}

fs::path with_suffix(fs::path p, const std::string &suffix) {
    p.replace_extension();
    p += suffix;
    return p;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

/// Sidecar with everything needed to reproduce the outputs. No timestamps,
/// so reruns are byte-identical too.
void write_meta(const fs::path &out, const std::string &command, std::uint64_t seed, const json &config,
                const std::vector<fs::path> &outputs) {
    json outs = json::array();
    for (const auto &o : outputs) {
        outs.push_back(o.filename().string());
    }
    const std::string canonical = config.dump();
    json meta{{"tool", "qeyboard"},
              {"version", std::string(kVersion)},
              {"command", command},
              {"seed", seed},
              {"config_hash", "fnv1a64:" + hex64(fnv1a64(canonical))},
              {"config", config},
              {"outputs", outs},
              {"libraries",
               {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"boost", BOOST_LIB_VERSION},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
    write_file(with_suffix(out, ".meta.json"), meta.dump(2) + "\n");
}

struct AudioArgs {
    double sample_rate = 44100.0;
    std::string phase_mode = "literal";
    std::string interp = "linear";
    int window = 3;

    RenderOptions options() const {
        RenderOptions o;
        o.sample_rate = sample_rate;
        o.phase_mode = phase_mode_from_string(phase_mode);
        o.interpolation.mode = interpolation_mode_from_string(interp);
        o.interpolation.window = window;
        return o;
    }

    json to_json() const {
        return {{"sample_rate", sample_rate}, {"phase_mode", phase_mode}, {"interp", interp}, {"window", window}};
    }

    void add_to(CLI::App *app) {
        app->add_option("--sample-rate", sample_rate, "Output sample rate in Hz")->capture_default_str();
        app->add_option("--phase-mode", phase_mode, "literal | accumulated")
            ->check(CLI::IsMember({"literal", "accumulated"}))
            ->capture_default_str();
        app->add_option("--interp", interp, "linear | smoothed")
            ->check(CLI::IsMember({"linear", "smoothed"}))
            ->capture_default_str();
        app->add_option("--window", window, "Smoothing window in frames (odd)")->capture_default_str();
    }
};

struct SpectrogramArgs {
    std::string path;
    std::size_t window = 4096;
    std::size_t hop = 1024;

    void add_to(CLI::App *app) {
        app->add_option("--spectrogram", path, "Also write a spectrogram CSV here");
        app->add_option("--spec-window", window, "Spectrogram window (power of two)")->capture_default_str();
        app->add_option("--spec-hop", hop, "Spectrogram hop in samples")->capture_default_str();
    }

    void write(const Waveform &w, std::vector<fs::path> &outputs) const {
        if (path.empty()) {
            return;
        }
        std::ostringstream os;
        write_spectrogram_csv(os, spectrogram(w, window, hop));
        write_file(path, os.str());
        outputs.push_back(path);
    }
};

void emit_audio(const std::vector<SoundFeatureFrame> &frames, const fs::path &out, const AudioArgs &audio,
                const SpectrogramArgs &spec, const fs::path &features_path, std::vector<fs::path> &outputs) {
    std::ostringstream csv;
    write_features_csv(csv, frames);
    write_file(features_path, csv.str());
    outputs.push_back(features_path);
    const auto wav = render_frames(frames, audio.options());
    write_wav(wav, out);
    outputs.push_back(out);
    spec.write(wav, outputs);
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
    std::string score;
    std::string out;
    std::string features;
    std::optional<double> dt;
    std::optional<std::uint64_t> shots;
    std::optional<std::uint64_t> seed;
    std::optional<double> fmin;
    std::optional<double> fmax;
    AudioArgs audio;
    SpectrogramArgs spec;
};

int cmd_render(const RenderArgs &a) {
    auto score = parse_score(read_file(a.score));
    auto &m = score.measurement;
    if (a.dt) {
        m.dt = *a.dt;
    }
    if (a.shots) {
        m.n_shots = *a.shots;
    }
    if (a.seed) {
        m.seed = *a.seed;
    }
    if (a.fmin || a.fmax) {
        m.frequency_map = FrequencyMap::affine(a.fmin.value_or(220.0), a.fmax.value_or(880.0));
    }
    try {
        m.validate(score.n_qubits);
    } catch (const std::invalid_argument &e) {
        throw InputError(e.what());
    }
    const auto frames = play_score(score);
    const fs::path out = a.out;
    const fs::path features = a.features.empty() ? with_suffix(out, ".features.csv") : fs::path(a.features);
    std::vector<fs::path> outputs;
    emit_audio(frames, out, a.audio, a.spec, features, outputs);
    json cfg{{"score_file", fs::path(a.score).filename().string()},
             {"score_hash", "fnv1a64:" + hex64(fnv1a64(read_file(a.score)))},
             {"n_qubits", score.n_qubits},
             {"duration", score.duration},
             {"measurement", to_json(m)},
             {"audio", a.audio.to_json()}};
    write_meta(out, "render", m.seed, cfg, outputs);
    std::cerr << "rendered " << frames.size() << " frames to " << out.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// ising

struct IsingArgs {
    int n = 4;
    double j = 1.0;
    std::string h_grid = "0:2:0.1";
    double h = 1.0;
    std::string boundary = "open";
    std::optional<double> epsilon;
    std::string mode = "spectrum";
    std::string solver = "exact";
    std::string out;
    std::string csv;
    std::string features;
    double fmin = 220.0;
    double fmax = 880.0;
    double step_seconds = 0.25;
    double eval_seconds = 0.01;
    std::size_t levels = 2;
    int starts = 5;
    std::optional<int> layers;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::string intensity = "abs";
    AudioArgs audio;
    SpectrogramArgs spec;
};

int cmd_ising(const IsingArgs &a) {
    IsingParams p;
    p.n_sites = a.n;
    p.J = a.j;
    p.boundary = boundary_from_string(a.boundary);
    p.epsilon = a.epsilon.value_or(kPinningFraction * std::abs(a.j));
    VqeConfig vc;
    vc.n_starts = a.starts;
    vc.n_layers = a.layers;
    vc.seed = a.seed;
    vc.n_shots = a.shots;
    const fs::path out = a.out;
    const fs::path csv_path = a.csv.empty() ? with_suffix(out, ".csv") : fs::path(a.csv);
    const fs::path features = a.features.empty() ? with_suffix(out, ".features.csv") : fs::path(a.features);
    std::vector<fs::path> outputs;
    json cfg{{"n", a.n},       {"J", a.j},        {"boundary", a.boundary}, {"epsilon", p.epsilon},
             {"mode", a.mode}, {"fmin", a.fmin}, {"fmax", a.fmax},         {"audio", a.audio.to_json()}};

    std::vector<SoundFeatureFrame> frames;
    if (a.mode == "callback") {
        p.h = a.h;
        p.validate();
        const auto H = build_hamiltonian(p);
        const auto r = vqd_spectrum(H, a.levels, vc);
        const auto trace = r.best_trace();
        std::ostringstream os;
        write_trace_csv(os, r.trace);
        write_file(csv_path, os.str());
        outputs.push_back(csv_path);
        frames = trace_to_features(trace, a.fmin, a.fmax, a.eval_seconds);
        for (std::size_t k = 0; k < r.levels.size(); ++k) {
            std::cerr << "level " << k << ": E = " << r.levels[k].energy << (r.levels[k].converged ? "" : " (not converged)")
                      << '\n';
        }
        cfg.update({{"h", a.h},
                    {"levels", a.levels},
                    {"starts", a.starts},
                    {"layers", a.layers ? json(*a.layers) : json(nullptr)},
                    {"shots", a.shots},
                    {"eval_seconds", a.eval_seconds}});
    } else if (a.mode == "spectrum" || a.mode == "magnetization") {
        const auto hs = parse_grid(a.h_grid);
        p.validate();
        SpectrumSolver solver = exact_spectrum;
        if (a.solver == "vqd") {
            solver = [&](const IsingParams &q) { return vqd_ising_spectrum(q, a.levels, vc); };
        }
        const auto results = sweep(p, hs, solver, 0);
        std::ostringstream os;
        write_sweep_csv(os, results);
        write_file(csv_path, os.str());
        outputs.push_back(csv_path);
        const auto pts = to_spectrum_points(results);
        const auto rule = a.mode == "spectrum" ? IntensityRule::Constant : intensity_rule_from_string(a.intensity);
        frames = spectrum_to_features(pts, a.fmin, a.fmax, a.step_seconds, rule);
        cfg.update({{"h_grid", a.h_grid},
                    {"solver", a.solver},
                    {"step_seconds", a.step_seconds},
                    {"intensity", a.mode == "spectrum" ? "constant" : a.intensity}});
        if (a.solver == "vqd") {
            cfg.update({{"levels", a.levels}, {"starts", a.starts}, {"shots", a.shots}});
        }
    } else {
        throw InputError("unknown mode '" + a.mode + "'");
    }
    if (frames.size() < 2) {
        throw InputError("need at least two frames to render audio; widen the h grid");
    }
    emit_audio(frames, out, a.audio, a.spec, features, outputs);
    write_meta(out, "ising", a.seed, cfg, outputs);
    std::cerr << "wrote " << frames.front().features.size() << " tracks x " << frames.size() << " frames to "
              << out.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
    std::string config;
    std::optional<std::uint16_t> port;
    std::optional<std::string> host;
};

int cmd_serve(const ServeArgs &a) {
    service::ServiceConfig cfg;
    if (!a.config.empty()) {
        if (!fs::exists(a.config)) {
            throw InputError("config file " + a.config + " not found");
        }
        cfg = service::load_service_config(a.config);
    }
    try {
        service::apply_env_overrides(cfg);
        if (a.port) {
            cfg.port = *a.port;
        }
        if (a.host) {
            cfg.host = *a.host;
        }
        cfg.validate();
    } catch (const std::invalid_argument &e) {
        throw InputError(e.what());
    }
    service::Server server(cfg);
    std::uint16_t port = 0;
    try {
        port = server.start();
    } catch (const boost::system::system_error &e) {
        std::cerr << "error: cannot listen on " << cfg.host << ':' << cfg.port << ": " << e.code().message() << '\n';
        return kExitRuntime;
    }
    std::cout << "listening on ws://" << cfg.host << ':' << port << "/" << std::endl;
    boost::asio::signal_set signals(server.io(), SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code &ec, int) {
        if (!ec) {
            std::cerr << "shutting down\n";
            server.stop();
        }
    });
    server.run();
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qeyboard: listen to quantum circuits and the Ising model"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RenderArgs ra;
    auto *render = app.add_subcommand("render", "Render a score to WAV plus feature CSV");
    render->add_option("--score", ra.score, "Score file (JSON)")->required();
    render->add_option("--out", ra.out, "Output WAV path")->required();
    render->add_option("--features", ra.features, "Feature CSV path (default <out stem>.features.csv)");
    render->add_option("--dt", ra.dt, "Override the measurement interval");
    render->add_option("--shots", ra.shots, "Override shots per frame (0 = exact)");
    render->add_option("--seed", ra.seed, "Override the sampling seed");
    render->add_option("--fmin", ra.fmin, "Use an affine frequency map starting here");
    render->add_option("--fmax", ra.fmax, "Use an affine frequency map ending here");
    ra.audio.add_to(render);
    ra.spec.add_to(render);

    IsingArgs ia;
    auto *ising = app.add_subcommand("ising", "Sonify the transverse-field Ising chain");
    ising->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    ising->add_option("--mode", ia.mode, "spectrum | magnetization | callback")
        ->check(CLI::IsMember({"spectrum", "magnetization", "callback"}))
        ->capture_default_str();
    ising->add_option("--n", ia.n, "Number of sites")->capture_default_str();
    ising->add_option("--j", ia.j, "Coupling J")->capture_default_str();
    ising->add_option("--h-grid", ia.h_grid, "Field sweep start:stop:step")->capture_default_str();
    ising->add_option("--h", ia.h, "Field for callback mode")->capture_default_str();
    ising->add_option("--boundary", ia.boundary, "open | periodic")
        ->check(CLI::IsMember({"open", "periodic"}))
        ->capture_default_str();
    ising->add_option("--epsilon", ia.epsilon, "Pinning field (default 0.05*|J|)");
    ising->add_option("--solver", ia.solver, "exact | vqd (sweep modes)")
        ->check(CLI::IsMember({"exact", "vqd"}))
        ->capture_default_str();
    ising->add_option("--out", ia.out, "Output WAV path")->required();
    ising->add_option("--csv", ia.csv, "Sweep or trace CSV path (default <out stem>.csv)");
    ising->add_option("--features", ia.features, "Feature CSV path (default <out stem>.features.csv)");
    ising->add_option("--fmin", ia.fmin, "Lowest frequency")->capture_default_str();
    ising->add_option("--fmax", ia.fmax, "Highest frequency")->capture_default_str();
    ising->add_option("--step-seconds", ia.step_seconds, "Seconds per h step")->capture_default_str();
    ising->add_option("--eval-seconds", ia.eval_seconds, "Seconds per optimizer evaluation")->capture_default_str();
    ising->add_option("--levels", ia.levels, "Levels sought by VQD")->capture_default_str();
    ising->add_option("--starts", ia.starts, "VQE multi-start count")->capture_default_str();
    ising->add_option("--layers", ia.layers, "Ansatz layers (default N)");
    ising->add_option("--shots", ia.shots, "Shots per energy estimate (0 = exact)")->capture_default_str();
    ising->add_option("--seed", ia.seed, "Seed")->capture_default_str();
    ising->add_option("--intensity", ia.intensity, "Magnetization mode intensity: abs | shifted | constant")
        ->check(CLI::IsMember({"abs", "shifted", "constant"}))
        ->capture_default_str();
    ia.audio.add_to(ising);
    ia.spec.add_to(ising);

    ServeArgs sa;
    auto *serve = app.add_subcommand("serve", "Run the live session server");
    serve->add_option("--config", sa.config, "Service config (JSON)");
    serve->add_option("--port", sa.port, "Port (overrides config and QEYBOARD_PORT; 0 picks one)");
    serve->add_option("--host", sa.host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*render) {
            return cmd_render(ra);
        }
        if (*ising) {
            return cmd_ising(ia);
        }
        return cmd_serve(sa);
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
