#include "tsm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tsm/acceptance.hpp"
#include "tsm/diagnostics.hpp"
#include "tsm/errors.hpp"
#include "tsm/signals.hpp"
#include "tsm/vocoder.hpp"
#include "tsm/wav.hpp"

namespace tsm::cli
{
    namespace
    {
        namespace fs = std::filesystem;

        /// Defaults: 4092-sample Hann window, M = 8192, a_s = 1024, tol = 1e-6.
        struct EngineOptions
        {
            double alpha = 1.0;
            std::size_t window = 4092;
            std::size_t fft_size = 8192;
            std::size_t hop = 1024;
            double tol = 1e-6;
            std::string algorithm = "pghi";
            std::uint64_t seed = 0;
            std::string scheme = "centered";

            void add_to(CLI::App& app)
            {
                app.add_option("--alpha", alpha, "Time-scaling factor (a_s / a_a)")->capture_default_str();
                app.add_option("--window", window, "Hann window length in samples")->capture_default_str();
                app.add_option("--fft-size", fft_size, "FFT length M")->capture_default_str();
                app.add_option("--hop", hop, "Synthesis hop a_s in samples")->capture_default_str();
                app.add_option("--tol", tol, "Relative magnitude tolerance")->capture_default_str();
                app.add_option("--algorithm", algorithm, "pghi | classical_trap | classical_rect")
                    ->capture_default_str();
                app.add_option("--seed", seed, "Seed for the random phase of negligible bins")->capture_default_str();
                app.add_option("--scheme", scheme, "Finite-difference scheme: centered | backward | forward")
                    ->capture_default_str();
            }

            DiffScheme diff_scheme() const
            {
                for (auto s : { DiffScheme::centered, DiffScheme::backward, DiffScheme::forward })
                {
                    if (scheme == to_string(s))
                    {
                        return s;
                    }
                }
                throw ParameterError("unknown difference scheme '" + scheme + "'");
            }

            nlohmann::ordered_json to_json() const
            {
                nlohmann::ordered_json j;
                j["window"] = "hann";
                j["window_length"] = window;
                j["fft_size"] = fft_size;
                j["synthesis_hop"] = hop;
                j["tol"] = tol;
                j["alpha"] = alpha;
                j["algorithm"] = algorithm;
                j["scheme"] = scheme;
                j["seed"] = seed;
                return j;
            }
        };

        struct Emit
        {
            bool spec = false;
            bool dt = false;
            bool df = false;
            bool trace = false;

            bool any_grid() const { return spec || dt || df; }
        };

        /// Comma-separated list, e.g. "spec,dt".
        Emit parse_emit(const std::string& list)
        {
            Emit emit;
            std::stringstream ss(list);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                if (item.empty())
                {
                    continue;
                }
                if (item == "spec")
                {
                    emit.spec = true;
                }
                else if (item == "dt")
                {
                    emit.dt = true;
                }
                else if (item == "df")
                {
                    emit.df = true;
                }
                else if (item == "trace")
                {
                    emit.trace = true;
                }
                else
                {
                    throw ParameterError("unknown diagnostic '" + item + "' (use spec, dt, df, trace)");
                }
            }
            return emit;
        }

        std::ofstream open_output(const fs::path& path)
        {
            if (path.has_parent_path())
            {
                std::error_code ec;
                fs::create_directories(path.parent_path(), ec);
            }
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
            {
                throw IoError("cannot create '" + path.string() + "'");
            }
            return out;
        }

        /// Writes the requested grids and trace for one signal; returns the files written.
        std::vector<fs::path> write_diagnostics(const Signal& signal, const StretchParams& params,
                                                const EngineOptions& engine, const Emit& emit,
                                                const fs::path& stem)
        {
            std::vector<fs::path> written;
            const AnalysisConfig cfg = analysis_config(params);
            const SpectralFrames frames = analyze(signal, cfg);
            const Grid<double> phase = frames.phase();
            const DiffScheme scheme = engine.diff_scheme();
            const GradientField grads =
                gradient_field(phase, params.analysis_hop, params.fft_size, params.analysis_freq_step, scheme);

            GridInfo info;
            info.fft_size = params.fft_size;
            info.hop = params.analysis_hop;
            info.lead_frames = frames.lead_frames;
            info.sample_rate = signal.sample_rate;
            info.scheme = to_string(scheme);

            auto put = [&](const char* name, const char* units, const Grid<double>& grid) {
                const fs::path path = stem.string() + "." + name + ".csv";
                auto out = open_output(path);
                info.name = name;
                info.units = units;
                write_grid_csv(out, grid, info);
                if (!out)
                {
                    throw IoError("write to '" + path.string() + "' failed");
                }
                written.push_back(path);
            };
            if (emit.spec)
            {
                put("spec", "dB", spectrogram_db(frames));
            }
            if (emit.dt)
            {
                put("dt", "Hz", instantaneous_frequency_hz(grads.dt, signal.sample_rate));
            }
            if (emit.df)
            {
                put("df", "ms", group_delay_ms(grads.df, params.signal_length, signal.sample_rate));
            }
            if (emit.trace)
            {
                StretchOptions options;
                options.seed = engine.seed;
                options.scheme = scheme;
                options.collect_traces = true;
                const std::vector<PropagationTrace> traces = stretch_with_report(signal, params, options).traces;
                const fs::path path = stem.string() + ".trace.jsonl";
                auto out = open_output(path);
                write_trace_jsonl(out, traces);
                written.push_back(path);
            }
            return written;
        }

        int cmd_stretch(const EngineOptions& engine, const std::string& input, const std::string& output,
                        const std::string& bit_depth, bool clip_guard, const Emit& emit, const std::string& diag_dir,
                        std::ostream& out)
        {
            const AudioFile audio = read_wav(input);
            if (audio.frames() == 0)
            {
                throw IoError("'" + input + "' contains no samples");
            }
            const StretchParams params =
                make_params(engine.alpha, engine.hop, engine.fft_size, engine.window, engine.tol, audio.frames());

            StretchOptions options;
            options.algorithm = parse_algorithm(engine.algorithm);
            options.seed = engine.seed;
            options.scheme = engine.diff_scheme();
            options.clip_guard = clip_guard;
            const SampleFormat format = bit_depth.empty() ? audio.format : parse_sample_format(bit_depth);

            std::vector<std::future<StretchReport>> jobs;
            for (std::size_t c = 0; c < audio.channels.size(); ++c)
            {
                jobs.push_back(std::async(std::launch::async, [&, c] {
                    return stretch_with_report(audio.channel(c), params, options);
                }));
            }
            AudioFile result;
            result.sample_rate = audio.sample_rate;
            for (auto& job : jobs)
            {
                result.channels.push_back(job.get().output.samples);
            }
            write_wav(result, output, format);
            out << "wrote " << output << ": " << result.frames() << " frames x " << result.channels.size()
                << " channel(s), alpha " << params.effective_alpha << " (analysis hop " << params.analysis_hop
                << ")\n";

            if (emit.any_grid() || emit.trace)
            {
                const fs::path dir = diag_dir.empty() ? fs::path(output).parent_path() : fs::path(diag_dir);
                const std::string stem = fs::path(output).stem().string();
                for (std::size_t c = 0; c < audio.channels.size(); ++c)
                {
                    const std::string suffix = audio.channels.size() > 1 ? ".ch" + std::to_string(c) : "";
                    for (const auto& path :
                         write_diagnostics(audio.channel(c), params, engine, emit, dir / (stem + suffix)))
                    {
                        out << "wrote " << path.string() << '\n';
                    }
                }
            }
            return ok;
        }

        Signal synthetic_signal(const std::string& kind, double duration, std::uint32_t rate, double frequency,
                                double f_start, double f_end, double position, double period, double amplitude)
        {
            TestSpec spec;
            spec.duration = duration;
            spec.sample_rate = rate;
            if (kind == "mixture" || kind == "fig1")
            {
                spec = mixture_spec(duration, rate);
            }
            else if (kind == "sinusoid")
            {
                spec.components = { Sinusoid{ frequency, amplitude, 0.0 } };
            }
            else if (kind == "chirp")
            {
                spec.components = { LinearChirp{ f_start, f_end, amplitude } };
            }
            else if (kind == "expchirp")
            {
                spec.components = { ExponentialChirp{ f_start, f_end, amplitude } };
            }
            else if (kind == "impulse")
            {
                spec.components = { Impulse{ position, amplitude } };
            }
            else if (kind == "impulses")
            {
                spec.components = { ImpulseTrain{ period, position, 0, amplitude } };
            }
            else
            {
                throw ParameterError("unknown signal '" + kind +
                                     "' (mixture, sinusoid, chirp, expchirp, impulse, impulses)");
            }
            return generate(spec);
        }

        struct SyntheticOptions
        {
            std::string kind = "mixture";
            double duration = 2.0;
            std::uint32_t rate = 44100;
            double frequency = 440.0;
            double f_start = 200.0;
            double f_end = 8000.0;
            double position = 1.0;
            double period = 0.5;
            double amplitude = 0.5;

            void add_to(CLI::App& app)
            {
                app.add_option("--duration", duration, "Seconds")->capture_default_str();
                app.add_option("--rate", rate, "Sample rate in Hz")->capture_default_str();
                app.add_option("--frequency", frequency, "Sinusoid frequency in Hz")->capture_default_str();
                app.add_option("--f-start", f_start, "Chirp start frequency in Hz")->capture_default_str();
                app.add_option("--f-end", f_end, "Chirp end frequency in Hz")->capture_default_str();
                app.add_option("--position", position, "Impulse position (first impulse) in seconds")
                    ->capture_default_str();
                app.add_option("--period", period, "Impulse train period in seconds")->capture_default_str();
                app.add_option("--amplitude", amplitude)->capture_default_str();
            }

            Signal make() const
            {
                return synthetic_signal(kind, duration, rate, frequency, f_start, f_end, position, period, amplitude);
            }
        };
    }  // namespace

    int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
    {
        CLI::App app{ "Phase-vocoder time-scale modification with phase gradient heap integration", "tsm" };
        app.require_subcommand(1);

        EngineOptions stretch_engine;
        std::string input;
        std::string output;
        std::string bit_depth;
        bool clip_guard = false;
        bool print_config = false;
        std::string emit_items;
        std::string diag_dir;
        auto* stretch = app.add_subcommand("stretch", "Time-stretch a WAV file");
        stretch_engine.add_to(*stretch);
        stretch->add_option("input", input, "Input WAV");
        stretch->add_option("output", output, "Output WAV");
        stretch->add_option("--bit-depth", bit_depth, "Output format 16 | 24 | 32f (default: input format)");
        stretch->add_flag("--clip-guard", clip_guard, "Rescale the output if its peak exceeds 1");
        stretch->add_option("--emit", emit_items, "Diagnostics: spec,dt,df,trace");
        stretch->add_option("--diag-dir", diag_dir, "Directory for diagnostics (default: next to output)");
        stretch->add_flag("--print-config", print_config, "Print the effective configuration as JSON");

        EngineOptions diag_engine;
        SyntheticOptions diag_signal;
        std::string diag_input;
        std::string diag_emit = "spec,dt,df";
        std::string out_dir = ".";
        std::string name;
        auto* diag = app.add_subcommand("diag", "Export spectrogram and phase-derivative grids");
        diag_engine.add_to(*diag);
        diag_signal.add_to(*diag);
        diag->add_option("--signal", diag_signal.kind, "mixture | sinusoid | chirp | expchirp | impulse | impulses")
            ->capture_default_str();
        diag->add_option("--input", diag_input, "Analyse the first channel of this WAV instead");
        diag->add_option("--emit", diag_emit, "spec,dt,df,trace")->capture_default_str();
        diag->add_option("--out-dir", out_dir)->capture_default_str();
        diag->add_option("--name", name, "File name stem (default: signal name or input stem)");

        SyntheticOptions gen_signal;
        std::string gen_output;
        std::string gen_depth = "32f";
        auto* gen = app.add_subcommand("generate", "Write a synthetic test signal as WAV");
        gen_signal.add_to(*gen);
        gen->add_option("--signal", gen_signal.kind, "mixture | sinusoid | chirp | expchirp | impulse | impulses")
            ->capture_default_str();
        gen->add_option("--bit-depth", gen_depth)->capture_default_str();
        gen->add_option("output", gen_output, "Output WAV")->required();

        auto* acc = app.add_subcommand("acceptance", "Run the end-to-end acceptance checks");

        std::vector<const char*> argv;
        for (const auto& a : args)
        {
            argv.push_back(a.c_str());
        }
        try
        {
            app.parse(static_cast<int>(argv.size()), argv.data());
        }
        catch (const CLI::ParseError& e)
        {
            return app.exit(e, out, err) == 0 ? ok : usage;
        }

        try
        {
            if (stretch->parsed())
            {
                if (print_config)
                {
                    auto config = stretch_engine.to_json();
                    config["clip_guard"] = clip_guard;
                    out << config.dump(2) << '\n';
                    if (input.empty() && output.empty())
                    {
                        return ok;
                    }
                }
                if (input.empty() || output.empty())
                {
                    err << "stretch: input and output paths are required\n";
                    return usage;
                }
                return cmd_stretch(stretch_engine, input, output, bit_depth, clip_guard, parse_emit(emit_items),
                                   diag_dir, out);
            }
            if (diag->parsed())
            {
                const Emit emit = parse_emit(diag_emit);
                Signal signal;
                if (!diag_input.empty())
                {
                    signal = read_wav(diag_input).channel(0);
                    if (name.empty())
                    {
                        name = fs::path(diag_input).stem().string();
                    }
                }
                else
                {
                    signal = diag_signal.make();
                    if (name.empty())
                    {
                        name = diag_signal.kind;
                    }
                }
                const StretchParams params = make_params(diag_engine.alpha, diag_engine.hop, diag_engine.fft_size,
                                                         diag_engine.window, diag_engine.tol, signal.size());
                for (const auto& path :
                     write_diagnostics(signal, params, diag_engine, emit, fs::path(out_dir) / name))
                {
                    out << "wrote " << path.string() << '\n';
                }
                return ok;
            }
            if (gen->parsed())
            {
                write_wav(gen_signal.make(), gen_output, parse_sample_format(gen_depth));
                out << "wrote " << gen_output << '\n';
                return ok;
            }
            if (acc->parsed())
            {
                const auto results = acceptance::run_all(out);
                const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
                return all ? ok : numeric;
            }
        }
        catch (const IoError& e)
        {
            err << "error: " << e.what() << '\n';
            return io;
        }
        catch (const ParameterError& e)
        {
            err << "error: " << e.what() << '\n';
            return usage;
        }
        catch (const std::exception& e)
        {
            err << "error: " << e.what() << '\n';
            return numeric;
        }
        return usage;
    }
}  // namespace tsm::cli
