#include "rici_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rici/clutterbox.hpp"
#include "rici/descriptor_io.hpp"
#include "rici/errors.hpp"
#include "rici/mesh_io.hpp"
#include "rici/parallel.hpp"
#include "rici/projection.hpp"
#include "rici/rici_descriptor.hpp"
#include "rici/shape_context.hpp"
#include "rici/spin_image.hpp"
#include "rici/synthetic.hpp"
#include "rici/throughput.hpp"
#include "rici/version.hpp"
#include "rici_cli/report.hpp"

namespace rici::cli {

namespace {

const std::map<std::string, SamplingMode> kSamplingModes{{"area", SamplingMode::AreaWeighted},
                                                        {"triangle", SamplingMode::PerTriangle}};

struct ExperimentOptions {
    std::uint64_t seed{0};
    double box_side{3.0};
    std::vector<int> counts{1, 5, 10};
    std::string method{"rici"};
    double support_radius{0.3};
    int resolution{64};
    int azimuth_bins{15};
    int elevation_bins{11};
    int radial_bins{12};
    double r_min{0.048};
    double density_radius{0.0};
    int samples_per_triangle{10};
    SamplingMode sampling{SamplingMode::AreaWeighted};
    std::optional<double> support_angle;
    std::string dataset;
    bool identity_reference{false};
    std::size_t clutter_samples{10000};
    std::filesystem::path out_dir{"clutterbox_out"};

    ClutterboxConfig to_config() const {
        ClutterboxConfig c;
        c.seed = seed;
        c.box_side = box_side;
        c.object_counts = counts;
        c.method = parse_method(method);
        c.support_radius = support_radius;
        c.resolution = resolution;
        c.shape_context.azimuth_bins = azimuth_bins;
        c.shape_context.elevation_bins = elevation_bins;
        c.shape_context.radial_bins = radial_bins;
        c.shape_context.r_min = r_min;
        c.local_density_radius = density_radius;
        c.samples_per_triangle = samples_per_triangle;
        c.sampling_mode = sampling;
        c.support_angle_degrees = support_angle;
        c.identity_reference_placement = identity_reference;
        c.clutter_samples = clutter_samples;
        std::string path = dataset;
        if (path.empty()) {
            if (const char* env = std::getenv(kDatasetEnv)) {
                path = env;
            }
        }
        if (path.empty()) {
            throw std::invalid_argument(std::string("no dataset given: pass --dataset or set ") + kDatasetEnv);
        }
        c.dataset = path;
        return c;
    }
};

void add_descriptor_options(CLI::App* app, ExperimentOptions& o) {
    app->add_option("--support-radius", o.support_radius, "Support radius (scene units)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--resolution", o.resolution, "RICI / spin image resolution N (N x N)")
        ->capture_default_str()
        ->check(CLI::Range(2, 4096));
    app->add_option("--azimuth-bins", o.azimuth_bins, "3DSC azimuth divisions J")->capture_default_str();
    app->add_option("--elevation-bins", o.elevation_bins, "3DSC elevation divisions K")->capture_default_str();
    app->add_option("--radial-bins", o.radial_bins, "3DSC radial shells L")->capture_default_str();
    app->add_option("--r-min", o.r_min, "3DSC smallest shell radius")->capture_default_str();
    app->add_option("--density-radius", o.density_radius, "3DSC density neighbourhood radius (0 = r-min)")
        ->capture_default_str();
    app->add_option("--samples-per-triangle", o.samples_per_triangle, "Surface samples per triangle (SI, 3DSC)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--sampling", o.sampling, "Sampling mode: area or triangle")
        ->transform(CLI::CheckedTransformer(kSamplingModes, CLI::ignore_case));
    app->add_option("--support-angle", o.support_angle, "Spin image support angle in degrees (default: no filter)")
        ->check(CLI::Range(0.0, 180.0));
    app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

void add_experiment_options(CLI::App* app, ExperimentOptions& o) {
    add_descriptor_options(app, o);
    app->add_option("--box-side", o.box_side, "Clutterbox side length")->capture_default_str();
    app->add_option("--counts", o.counts, "Object counts, comma separated, starting at 1")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--dataset", o.dataset, std::string("Mesh directory (default: $") + kDatasetEnv + ")");
    app->add_flag("--identity-reference", o.identity_reference,
                  "Debug: keep the reference object untransformed");
    app->add_option("--clutter-samples", o.clutter_samples,
                    "Monte-Carlo samples per vertex for clutter fractions (0 disables)")
        ->capture_default_str();
    app->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
}

std::string format_number(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& ext) {
    auto copy = path;
    copy.replace_extension(ext);
    return copy;
}

void write_level_csvs(const std::filesystem::path& dir, const std::string& prefix, const ClutterboxResult& result,
                      CommandResult& command) {
    for (const auto& level : result.levels) {
        const std::string n = std::to_string(level.histogram.clutter_object_count);
        const auto ranks = dir / (prefix + "ranks_n" + n + ".csv");
        const auto heat = dir / (prefix + "heatmap_n" + n + ".csv");
        write_rank_csv(ranks, level.histogram);
        write_heatmap_csv(heat, level.records);
        command.outputs.push_back(ranks);
        command.outputs.push_back(heat);
    }
}

std::ofstream open_file(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    return in;
}

// ---------------------------------------------------------------- describe

struct DescribeOptions {
    ExperimentOptions descriptor;
    std::filesystem::path mesh;
    std::size_t vertex{0};
    std::filesystem::path out;
    std::filesystem::path pgm;
    bool normalize{false};
};

void cmd_describe(const DescribeOptions& o, std::ostream& out, CommandResult& result) {
    const Method method = parse_method(o.descriptor.method);
    const LoadedMesh loaded = load_mesh(o.mesh);
    const TriangleMesh mesh = o.normalize ? normalize_to_unit_sphere(loaded.mesh).mesh : loaded.mesh;
    if (loaded.degenerate_faces_dropped > 0) {
        result.diagnostics.push_back("dropped " + std::to_string(loaded.degenerate_faces_dropped) +
                                     " zero-area faces");
    }
    const UniqueVertices anchors = unique_vertices(mesh);
    if (o.vertex >= anchors.points.size()) {
        throw std::invalid_argument("vertex index " + std::to_string(o.vertex) + " out of range (mesh has " +
                                    std::to_string(anchors.points.size()) + " unique vertices)");
    }
    const OrientedPoint& anchor = anchors.points[o.vertex];
    const auto& d = o.descriptor;
    const std::filesystem::path pgm = o.pgm.empty() ? with_suffix(o.out, ".pgm") : o.pgm;
    const SceneObject object{&mesh, 0};
    auto samples = [&] {
        Prng rng = Prng(d.seed).derive("describe-samples");
        return sample_point_cloud(std::span(&object, 1),
                                  static_cast<std::size_t>(d.samples_per_triangle) * mesh.triangle_count(), rng,
                                  d.sampling);
    };
    switch (method) {
        case Method::Rici: {
            RiciDiagnostics diagnostics;
            const RiciDescriptor descriptor =
                generate_rici(mesh, anchor, d.support_radius, d.resolution, &diagnostics);
            auto csv = open_file(o.out);
            write_csv(csv, descriptor);
            auto image = open_file(pgm);
            write_pgm(image, descriptor);
            if (diagnostics.coplanar_rows + diagnostics.degenerate_rows + diagnostics.degenerate_triangles > 0) {
                result.diagnostics.push_back(
                    "skipped " + std::to_string(diagnostics.coplanar_rows) + " coplanar rows, " +
                    std::to_string(diagnostics.degenerate_rows) + " grazing rows, " +
                    std::to_string(diagnostics.degenerate_triangles) + " degenerate triangles");
            }
            result.outputs = {o.out, pgm};
            break;
        }
        case Method::SpinImage: {
            const auto cloud = samples();
            const SpinImageDescriptor descriptor =
                generate_spin_image(cloud, anchor, d.support_radius, d.resolution, d.support_angle);
            auto csv = open_file(o.out);
            write_csv(csv, descriptor);
            auto image = open_file(pgm);
            write_pgm(image, descriptor);
            result.outputs = {o.out, pgm};
            break;
        }
        case Method::ShapeContext: {
            ShapeContextParams params;
            params.azimuth_bins = d.azimuth_bins;
            params.elevation_bins = d.elevation_bins;
            params.radial_bins = d.radial_bins;
            params.r_min = d.r_min;
            params.r_max = d.support_radius;
            const auto cloud = samples();
            const ShapeContextDescriptor descriptor = generate_shape_context(
                cloud, anchor, params, d.density_radius > 0.0 ? d.density_radius : params.r_min);
            auto csv = open_file(o.out);
            write_csv(csv, descriptor);
            result.outputs = {o.out};
            break;
        }
    }
    for (const auto& path : result.outputs) {
        out << path.string() << '\n';
    }
}

// ----------------------------------------------------------------- compare

struct CompareOptions {
    std::filesystem::path needle;
    std::filesystem::path haystack;
    std::optional<double> threshold;
    std::string method;
};

void cmd_compare(const CompareOptions& o, std::ostream& out) {
    auto needle_in = open_input(o.needle);
    auto haystack_in = open_input(o.haystack);
    const DescriptorKind kind = peek_descriptor_kind(needle_in);
    const DescriptorKind other = peek_descriptor_kind(haystack_in);
    if (kind != other) {
        throw DataError("needle is a " + to_string(kind) + " descriptor but haystack is a " + to_string(other));
    }
    if (!o.method.empty()) {
        const Method m = parse_method(o.method);
        const DescriptorKind expected = m == Method::Rici        ? DescriptorKind::Rici
                                        : m == Method::SpinImage ? DescriptorKind::SpinImage
                                                                 : DescriptorKind::ShapeContext;
        if (expected != kind) {
            throw DataError("--method " + o.method + " does not match the " + to_string(kind) + " files");
        }
    }
    auto mismatch = [] { return DataError("descriptor parameters differ"); };
    auto verdict = [&](double value) {
        out << (value <= *o.threshold ? "<=" : ">") << '\n';
    };
    switch (kind) {
        case DescriptorKind::Rici: {
            const RiciDescriptor a = read_rici_csv(needle_in);
            const RiciDescriptor b = read_rici_csv(haystack_in);
            if (a.resolution != b.resolution || a.support_radius != b.support_radius) {
                throw mismatch();
            }
            if (o.threshold) {
                if (*o.threshold < 0) {
                    out << ">\n";
                    return;
                }
                const auto limit = static_cast<std::uint64_t>(std::floor(*o.threshold));
                verdict(double(crd_distance(a, b, limit)));
            } else {
                out << crd_distance(a, b) << '\n';
            }
            break;
        }
        case DescriptorKind::SpinImage: {
            const SpinImageDescriptor a = read_spin_image_csv(needle_in);
            const SpinImageDescriptor b = read_spin_image_csv(haystack_in);
            if (a.resolution != b.resolution || a.support_radius != b.support_radius) {
                throw mismatch();
            }
            const double value = pearson_distance(a, b);
            if (o.threshold) {
                verdict(value);
            } else {
                out << format_number(value) << '\n';
            }
            break;
        }
        case DescriptorKind::ShapeContext: {
            const ShapeContextDescriptor a = read_shape_context_csv(needle_in);
            const ShapeContextDescriptor b = read_shape_context_csv(haystack_in);
            if (!(a.params == b.params)) {
                throw mismatch();
            }
            const double value = shape_context_distance(a, b);
            if (o.threshold) {
                verdict(value);
            } else {
                out << format_number(value) << '\n';
            }
            break;
        }
    }
}

// -------------------------------------------------------------- clutterbox

void report_warnings(const ClutterboxResult& r, CommandResult& result) {
    for (const auto& w : r.warnings) {
        result.diagnostics.push_back(w);
    }
}

void cmd_clutterbox(const ExperimentOptions& o, std::ostream& out, CommandResult& result) {
    const ClutterboxConfig config = o.to_config();
    config.validate();
    const ClutterboxResult r = run_clutterbox(config);
    report_warnings(r, result);
    std::filesystem::create_directories(o.out_dir);
    const auto json_path = o.out_dir / "clutterbox.json";
    const auto timing_path = o.out_dir / "timings.json";
    write_json(json_path, clutterbox_report(r));
    write_json(timing_path, clutterbox_timings(r));
    result.outputs = {json_path, timing_path};
    write_level_csvs(o.out_dir, "", r, result);
    for (const auto& level : r.levels) {
        out << "objects=" << level.histogram.clutter_object_count << " queries=" << level.histogram.total_queries
            << " rank0=" << format_number(level.histogram.rank0_fraction()) << '\n';
    }
}

void cmd_ablation(const ExperimentOptions& o, const std::vector<double>& angles, std::ostream& out,
                  CommandResult& result) {
    ClutterboxConfig config = o.to_config();
    config.method = Method::SpinImage;
    config.validate();
    for (const double a : angles) {
        if (a < 0.0 || a > 180.0) {
            throw std::invalid_argument("support angles must lie in [0, 180]");
        }
    }
    const auto runs = run_support_angle_ablation(config, angles);
    std::filesystem::create_directories(o.out_dir);
    nlohmann::ordered_json report;
    report["tool"] = "rici";
    report["version"] = kVersion;
    report["angles"] = nlohmann::ordered_json::array();
    for (const auto& [angle, r] : runs) {
        report_warnings(r, result);
        report["angles"].push_back({{"support_angle_degrees", angle}, {"result", clutterbox_report(r)}});
        write_level_csvs(o.out_dir, "angle" + format_number(angle) + "_", r, result);
        for (const auto& level : r.levels) {
            out << "angle=" << format_number(angle) << " objects=" << level.histogram.clutter_object_count
                << " rank0=" << format_number(level.histogram.rank0_fraction()) << '\n';
        }
    }
    const auto json_path = o.out_dir / "ablation.json";
    write_json(json_path, report);
    result.outputs.insert(result.outputs.begin(), json_path);
}

// ------------------------------------------------------------------- bench

struct BenchOptions {
    std::uint64_t seed{0};
    std::size_t count{10'000'000};
    std::vector<int> counts{1, 5, 10};
    int objects{5};
    std::size_t max_anchors{0};
    std::size_t max_needles{200};
    int repetitions{3};
    ExperimentOptions descriptor;
    std::filesystem::path out;
};

class OutputSink {
public:
    OutputSink(const std::filesystem::path& path, std::ostream& fallback, CommandResult& result) {
        if (!path.empty()) {
            file_ = open_file(path);
            result.outputs.push_back(path);
        }
        stream_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

GenerationBenchConfig generation_config(const BenchOptions& o) {
    GenerationBenchConfig c;
    c.support_radius = o.descriptor.support_radius;
    c.resolution = o.descriptor.resolution;
    c.samples_per_triangle = o.descriptor.samples_per_triangle;
    c.max_anchors = o.max_anchors;
    c.seed = o.seed;
    c.repetitions = o.repetitions;
    return c;
}

void cmd_bench_projection(const BenchOptions& o, std::ostream& out, CommandResult& result) {
    if (o.count == 0) {
        throw std::invalid_argument("--count must be >= 1");
    }
    const ProjectionBenchResult r = bench_projection(o.count, Prng(o.seed));
    OutputSink sink(o.out, out, result);
    auto& s = sink.stream();
    s << "count,two_rotation_seconds,oracle_seconds,speedup,two_rotation_checksum,oracle_checksum,"
         "max_subsample_deviation\n"
      << std::setprecision(17) << r.count << ',' << r.two_rotation_seconds << ',' << r.oracle_seconds << ','
      << (r.two_rotation_seconds > 0 ? r.oracle_seconds / r.two_rotation_seconds : 0.0) << ','
      << r.two_rotation_checksum << ',' << r.oracle_checksum << ',' << r.max_subsample_deviation << '\n';
}

void cmd_bench_generation(const BenchOptions& o, std::ostream& out, CommandResult& result) {
    const GenerationBenchConfig config = generation_config(o);
    OutputSink sink(o.out, out, result);
    auto& s = sink.stream();
    s << "method,objects,triangles,descriptors,seconds,descriptors_per_second\n" << std::setprecision(17);
    for (const int count : o.counts) {
        const BenchScene scene = synthetic_bench_scene(count, o.seed);
        for (const Method m : {Method::Rici, Method::SpinImage, Method::ShapeContext}) {
            const GenerationBenchRow row = bench_generation(scene, count, m, config);
            s << to_string(m) << ',' << row.objects << ',' << row.triangles << ',' << row.descriptors << ','
              << row.seconds << ',' << row.descriptors_per_second() << '\n';
        }
    }
}

void cmd_bench_matching(const BenchOptions& o, std::ostream& out, CommandResult& result) {
    if (o.objects < 1) {
        throw std::invalid_argument("--objects must be >= 1");
    }
    const BenchScene scene = synthetic_bench_scene(o.objects, o.seed);
    const auto rows = bench_matching(scene, generation_config(o), o.max_needles);
    OutputSink sink(o.out, out, result);
    auto& s = sink.stream();
    s << "kernel,objects,comparisons,seconds,comparisons_per_second,checksum\n" << std::setprecision(17);
    for (const auto& row : rows) {
        s << row.kernel << ',' << o.objects << ',' << row.comparisons << ',' << row.seconds << ','
          << row.comparisons_per_second() << ',' << row.checksum << '\n';
    }
}

// ------------------------------------------------------------- make-corpus

void cmd_make_corpus(const std::filesystem::path& dir, int count, std::uint64_t seed, std::ostream& out,
                     CommandResult& result) {
    result.outputs = write_synthetic_corpus(dir, count, seed);
    out << "wrote " << result.outputs.size() << " meshes to " << dir.string() << '\n';
}

}  // namespace

CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CommandResult result;
    CLI::App app{"RICI, spin image and 3D shape context descriptors with the clutterbox benchmark", "rici"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "TOML/INI config file; flags take precedence");
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    DescribeOptions describe;
    auto* describe_cmd = app.add_subcommand("describe", "Compute one descriptor at a mesh vertex");
    add_descriptor_options(describe_cmd, describe.descriptor);
    describe_cmd->add_option("--mesh", describe.mesh, "OBJ or PLY mesh")->required();
    describe_cmd->add_option("--method", describe.descriptor.method, "rici, si or 3dsc")->capture_default_str();
    describe_cmd->add_option("--vertex", describe.vertex, "Unique vertex index")->required();
    describe_cmd->add_option("--out", describe.out, "Descriptor CSV path")->required();
    describe_cmd->add_option("--pgm", describe.pgm, "PGM path for 2D descriptors (default: --out with .pgm)");
    describe_cmd->add_flag("--normalize", describe.normalize, "Normalize the mesh to the unit sphere first");

    CompareOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "Distance between two descriptor files");
    compare_cmd->add_option("needle", compare.needle, "Needle descriptor CSV")->required();
    compare_cmd->add_option("haystack", compare.haystack, "Haystack descriptor CSV")->required();
    compare_cmd->add_option("--threshold", compare.threshold, "Print only the <= / > verdict against T");
    compare_cmd->add_option("--method", compare.method, "Expected method (rici, si, 3dsc)");

    ExperimentOptions experiment;
    auto* clutterbox_cmd = app.add_subcommand("clutterbox", "Run the clutterbox experiment");
    add_experiment_options(clutterbox_cmd, experiment);
    clutterbox_cmd->add_option("--method", experiment.method, "rici, si or 3dsc")->capture_default_str();

    ExperimentOptions ablation;
    std::vector<double> angles{60.0, 180.0};
    auto* ablation_cmd =
        app.add_subcommand("ablation-support-angle", "Spin image clutterbox runs over several support angles");
    add_experiment_options(ablation_cmd, ablation);
    ablation_cmd->add_option("--angles", angles, "Support angles in degrees")->delimiter(',')->capture_default_str();

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Throughput micro-benchmarks (CSV)");
    bench_cmd->require_subcommand(1);
    bench_cmd->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "CSV path (default: stdout)");
    auto* bench_projection_cmd = bench_cmd->add_subcommand("projection", "Two-rotation vs frame-matrix projection");
    bench_projection_cmd->add_option("--count", bench.count, "Points to project")->capture_default_str();
    auto* bench_generation_cmd = bench_cmd->add_subcommand("generation", "Descriptors per second vs scene size");
    bench_generation_cmd->add_option("--counts", bench.counts, "Object counts")->delimiter(',')->capture_default_str();
    bench_generation_cmd->add_option("--max-anchors", bench.max_anchors, "Anchors per measurement (0 = all)")
        ->capture_default_str();
    bench_generation_cmd->add_option("--repetitions", bench.repetitions, "Runs per measurement; the fastest is kept")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* bench_matching_cmd = bench_cmd->add_subcommand("matching", "Distance evaluations per second");
    bench_matching_cmd->add_option("--objects", bench.objects, "Objects in the scene")->capture_default_str();
    bench_matching_cmd->add_option("--max-needles", bench.max_needles, "Reference descriptors (0 = all)")
        ->capture_default_str();
    for (auto* sub : {bench_generation_cmd, bench_matching_cmd}) {
        sub->add_option("--support-radius", bench.descriptor.support_radius, "Support radius")->capture_default_str();
        sub->add_option("--resolution", bench.descriptor.resolution, "Image resolution")->capture_default_str();
        sub->add_option("--samples-per-triangle", bench.descriptor.samples_per_triangle, "Samples per triangle")
            ->capture_default_str();
    }

    std::filesystem::path corpus_dir;
    int corpus_count = 60;
    std::uint64_t corpus_seed = 1;
    auto* corpus_cmd = app.add_subcommand("make-corpus", "Write a synthetic mesh corpus (OBJ)");
    corpus_cmd->add_option("--out", corpus_dir, "Output directory")->required();
    corpus_cmd->add_option("--count", corpus_count, "Number of meshes")->capture_default_str()->check(CLI::PositiveNumber);
    corpus_cmd->add_option("--seed", corpus_seed, "Random seed")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        result.exit_code = code == 0 ? kSuccess : kUsageError;
        return result;
    }

    try {
        set_thread_count(static_cast<unsigned>(threads));
        if (describe_cmd->parsed()) {
            cmd_describe(describe, out, result);
        } else if (compare_cmd->parsed()) {
            cmd_compare(compare, out);
        } else if (clutterbox_cmd->parsed()) {
            cmd_clutterbox(experiment, out, result);
        } else if (ablation_cmd->parsed()) {
            cmd_ablation(ablation, angles, out, result);
        } else if (bench_projection_cmd->parsed()) {
            cmd_bench_projection(bench, out, result);
        } else if (bench_generation_cmd->parsed()) {
            cmd_bench_generation(bench, out, result);
        } else if (bench_matching_cmd->parsed()) {
            cmd_bench_matching(bench, out, result);
        } else if (corpus_cmd->parsed()) {
            cmd_make_corpus(corpus_dir, corpus_count, corpus_seed, out, result);
        }
    } catch (const std::invalid_argument& e) {
        result.exit_code = kUsageError;
        result.outputs.clear();
        result.diagnostics.push_back(std::string("error: ") + e.what());
    } catch (const DataError& e) {
        result.exit_code = kDataError;
        result.outputs.clear();
        result.diagnostics.push_back(std::string("error: ") + e.what());
    } catch (const std::exception& e) {
        result.exit_code = kDataError;
        result.outputs.clear();
        result.diagnostics.push_back(std::string("error: ") + e.what());
    }
    for (const auto& d : result.diagnostics) {
        err << d << '\n';
    }
    return result;
}

}  // namespace rici::cli
