#include "prewet/cli_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "prewet/analysis.hpp"
#include "prewet/cone.hpp"
#include "prewet/core_model.hpp"
#include "prewet/csv.hpp"
#include "prewet/error.hpp"
#include "prewet/ferrari_spohn.hpp"
#include "prewet/interface.hpp"
#include "prewet/ising_sampler.hpp"
#include "prewet/walk.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace prewet {

namespace {

// ------------------------------------------------------------------ config

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ValidationError("config key '" + key + "': cannot parse '" + text + "'");
    return v;
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number_field(const char* section, const char* key, T RunConfig::*member) {
    return {section, key,
            [member, key](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(v, key); },
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
                else return std::to_string(c.*member);
            }};
}

Field string_field(const char* section, const char* key, std::string RunConfig::*member) {
    return {section, key, [member](RunConfig& c, const std::string& v) { c.*member = v; },
            [member](const RunConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        string_field("run", "command", &RunConfig::command),
        number_field("run", "format_version", &RunConfig::format_version),
        number_field("run", "seed", &RunConfig::seed),
        number_field("run", "replicas", &RunConfig::replicas),
        string_field("run", "out", &RunConfig::out),
        string_field("run", "in", &RunConfig::in),
        number_field("run", "samples", &RunConfig::samples),
        number_field("model", "beta", &RunConfig::beta),
        number_field("model", "lambda", &RunConfig::lambda),
        number_field("model", "n", &RunConfig::n),
        number_field("model", "chi", &RunConfig::chi),
        number_field("ising", "burnin", &RunConfig::burnin),
        number_field("ising", "thin", &RunConfig::thin),
        number_field("ising", "sweeps", &RunConfig::sweeps),
        string_field("walk", "law", &RunConfig::law),
    };
    return f;
}

// ------------------------------------------------------------------ output helpers

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

std::string input_dir(const RunConfig& cfg) { return cfg.in.empty() ? cfg.out : cfg.in; }

void prepare_out(const RunConfig& cfg) {
    if (cfg.out.empty()) throw ValidationError("--out must name a directory");
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw RuntimeFailure("cannot create " + cfg.out + ": " + ec.message(), "io");
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out) / name).string();
}

RunManifest finish(const RunConfig& cfg, const std::string& started,
                   const std::vector<std::string>& outputs,
                   std::map<std::string, std::string> notes = {}) {
    RunManifest m;
    m.notes = std::move(notes);
    m.config = cfg;
    m.started = started;
    for (int r = 0; r < cfg.replicas; ++r) m.replica_seeds.push_back(replica_seed(cfg.seed, r));
    for (const auto& name : outputs) m.outputs[name] = sha256_file(out_path(cfg, name));
    m.finished = utc_now();
    write_manifest(m, out_path(cfg, manifest_name(cfg.command)));
    std::ofstream(out_path(cfg, "run." + cfg.command + ".cfg"), std::ios::binary) << format_config(cfg);
    return m;
}

void check_common(const RunConfig& cfg) {
    if (cfg.replicas < 1) throw ValidationError("replicas must be >= 1");
    if (cfg.samples < 1) throw ValidationError("samples must be >= 1");
    if (cfg.format_version != kFormatVersion)
        throw ValidationError("unsupported format_version " + std::to_string(cfg.format_version));
}

/// Runs fn(replica) for every replica on up to `threads` workers; results
/// are stored by replica index, so the order never depends on scheduling.
template <class R>
std::vector<R> per_replica(int replicas, int threads, const std::function<R(int)>& fn) {
    std::vector<R> out(static_cast<std::size_t>(replicas));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto work = [&] {
        for (int r = next++; r < replicas; r = next++) {
            try {
                out[static_cast<std::size_t>(r)] = fn(r);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(threads, 1, replicas);
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

// Equilibration is not guaranteed by the sampler; these numbers let the
// reader judge it. Lag-one autocorrelation of the minus area within
// replicas, and a z-score comparing the first and second half of each
// replica's samples.
template <class Record>
std::string equilibration_note(const std::vector<std::vector<Record>>& nested, const SampleSchedule& sch) {
    std::vector<double> all;
    for (const auto& rep : nested)
        for (const auto& r : rep) all.push_back(static_cast<double>(r.profile.minus_area));
    std::ostringstream out;
    out << "burnin_sweeps=" << sch.burnin_sweeps << " thinning=" << sch.thinning;
    if (all.size() < 4) return out.str() + " (too few samples for diagnostics)";
    double mean = 0;
    for (double a : all) mean += a;
    mean /= static_cast<double>(all.size());
    double c0 = 0, c1 = 0, first = 0, second = 0;
    long nf = 0, ns = 0;
    std::size_t k = 0;
    for (const auto& rep : nested) {
        for (std::size_t i = 0; i < rep.size(); ++i) {
            const double a = all[k + i];
            c0 += (a - mean) * (a - mean);
            if (i + 1 < rep.size()) c1 += (a - mean) * (all[k + i + 1] - mean);
            if (2 * i < rep.size()) first += a, ++nf;
            else second += a, ++ns;
        }
        k += rep.size();
    }
    const double var = c0 / static_cast<double>(all.size() - 1);
    const double lag1 = c0 > 0 ? c1 / c0 : 0.0;
    const double se = std::sqrt(var * (1.0 / static_cast<double>(nf) + 1.0 / static_cast<double>(ns)));
    const double z = se > 0 ? (second / static_cast<double>(ns) - first / static_cast<double>(nf)) / se : 0.0;
    out << " lag1_area_autocorr=" << format_double(lag1) << " half_split_area_z=" << format_double(z);
    return out.str();
}

StepLaw load_law(const std::string& path) {
    return path.empty() ? StepLaw::default_law() : StepLaw::read_csv(path);
}

// ------------------------------------------------------------------ readers for analyze

struct IsingData {
    std::vector<InterfaceSample> samples;
    std::vector<EffectiveWalk> step_walks;  // steps only; heights start at 0
};

IsingData read_ising(const std::string& dir) {
    IsingData d;
    std::map<std::pair<long, long>, std::size_t> index;
    {
        CsvReader rd((fs::path(dir) / "interface.csv").string(),
                     {"replica", "sample", "i", "gamma_plus", "gamma_minus"});
        while (rd.next()) {
            const std::pair key{rd.get_long(0), rd.get_long(1)};
            auto [it, fresh] = index.try_emplace(key, d.samples.size());
            if (fresh) {
                d.samples.emplace_back();
                d.samples.back().profile.x_min = static_cast<int>(rd.get_long(2));
            }
            auto& p = d.samples[it->second].profile;
            p.gamma_plus.push_back(static_cast<int>(rd.get_long(3)));
            p.gamma_minus.push_back(static_cast<int>(rd.get_long(4)));
        }
    }
    {
        CsvReader rd((fs::path(dir) / "interface_summary.csv").string(),
                     {"replica", "sample", "minus_area", "gamma_length", "max_closed_diameter",
                      "hits_box"});
        while (rd.next()) {
            const auto it = index.find({rd.get_long(0), rd.get_long(1)});
            if (it == index.end()) throw SchemaMismatch("summary row " + std::to_string(rd.row()) + " has no profile");
            auto& s = d.samples[it->second];
            s.profile.minus_area = rd.get_long(2);
            s.profile.gamma_length = rd.get_long(3);
            s.max_closed_diameter = static_cast<int>(rd.get_long(4));
        }
    }
    {
        CsvReader rd((fs::path(dir) / "steps.csv").string(),
                     {"replica", "sample", "step_index", "theta", "zeta"});
        std::pair<long, long> cur{-1, -1};
        while (rd.next()) {
            const std::pair key{rd.get_long(0), rd.get_long(1)};
            if (key != cur) {
                d.step_walks.push_back(EffectiveWalk{{{0, 0}}});
                cur = key;
            }
            auto& pts = d.step_walks.back().points;
            pts.push_back(pts.back() + DualPoint{static_cast<int>(rd.get_long(3)),
                                                 static_cast<int>(rd.get_long(4))});
        }
    }
    return d;
}

std::vector<EffectiveWalk> read_walks(const std::string& dir) {
    std::vector<EffectiveWalk> walks;
    CsvReader rd((fs::path(dir) / "walks.csv").string(), {"replica", "sample", "k", "T", "Z"});
    std::pair<long, long> cur{-1, -1};
    while (rd.next()) {
        const std::pair key{rd.get_long(0), rd.get_long(1)};
        if (key != cur) {
            walks.emplace_back();
            cur = key;
        }
        walks.back().points.push_back({static_cast<int>(rd.get_long(3)), static_cast<int>(rd.get_long(4))});
    }
    return walks;
}

json quantiles_json(const Quantiles& q) {
    return json{{"q05", q.q05}, {"q25", q.q25}, {"q50", q.q50}, {"q75", q.q75}, {"q95", q.q95}};
}

// KS at marked times and the two-time check on a rescaled ensemble.
void fs_comparison(const RescaledEnsemble& e, const FSReference& ref, std::uint64_t seed, json& out) {
    const double h = e.window / 2;
    json ks = json::array();
    for (double t : {-h, 0.0, h}) {
        const auto r = ks_against_fs(e.values_at(t), ref, seed);
        ks.push_back({{"t", t}, {"statistic", r.statistic}, {"ci_low", r.ci_low},
                      {"ci_high", r.ci_high}, {"null_band", r.null_band}});
    }
    out["ks"] = ks;
    const auto a = e.values_at(-h), b = e.values_at(h);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(a[i], b[i]);
    const auto tt = two_time_check(pairs, 2 * h, ref, seed);
    out["two_time"] = json::array({{{"t1", -h}, {"t2", h}, {"discrepancy", tt.discrepancy},
                                    {"null_q95", tt.null_q95}, {"bins", tt.bins}}});
}

}  // namespace

// ------------------------------------------------------------------ config API

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "run" && section != "model" && section != "ising" && section != "walk")
                throw ValidationError("config line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& fl = fields();
        const auto it = std::find_if(fl.begin(), fl.end(), [&](const Field& f) {
            return f.section == section && f.key == key;
        });
        if (it == fl.end())
            throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                                  "' in section [" + section + "]");
        it->set(base, value);
    }
    return base;
}

std::string format_config(const RunConfig& cfg) {
    std::string out, section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    }
    return out;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + path, "io");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto text = ss.str();
    if (fs::path(path).extension() == ".json") {
        const auto j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.contains("config_text"))
            throw ValidationError(path + " is not a manifest");
        return parse_config(j.at("config_text").get<std::string>(), base);
    }
    return parse_config(text, base);
}

// ------------------------------------------------------------------ manifest

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DigestMismatch("missing file " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string manifest_name(const std::string& command) { return "manifest." + command + ".json"; }

void write_manifest(const RunManifest& m, const std::string& path) {
    json j;
    j["tool"] = "prewet";
    j["tool_version"] = m.tool_version;
    j["format_version"] = m.config.format_version;
    j["command"] = m.config.command;
    j["config_text"] = format_config(m.config);
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["replica_seeds"] = m.replica_seeds;
    j["outputs"] = json::object();
    for (const auto& [k, v] : m.outputs) j["outputs"][k] = v;
    if (!m.notes.empty()) j["notes"] = m.notes;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + path, "io");
    out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open manifest " + path, "io");
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaMismatch(path + ": not valid JSON");
    RunManifest m;
    try {
        m.config = parse_config(j.at("config_text").get<std::string>());
        m.tool_version = j.at("tool_version").get<std::string>();
        m.started = j.at("started").get<std::string>();
        m.finished = j.at("finished").get<std::string>();
        m.replica_seeds = j.at("replica_seeds").get<std::vector<std::uint64_t>>();
        for (const auto& [k, v] : j.at("outputs").items()) m.outputs[k] = v.get<std::string>();
        if (j.contains("notes"))
            for (const auto& [k, v] : j.at("notes").items()) m.notes[k] = v.get<std::string>();
    } catch (const json::exception& e) {
        throw SchemaMismatch(path + ": " + e.what());
    }
    return m;
}

void verify_manifest(const RunManifest& m, const std::string& dir) {
    for (const auto& [name, digest] : m.outputs) {
        const auto path = (fs::path(dir) / name).string();
        if (!fs::exists(path)) throw DigestMismatch(name + " listed in the manifest is missing");
        if (sha256_file(path) != digest) throw DigestMismatch(name + " does not match its manifest digest");
    }
}

// ------------------------------------------------------------------ commands

RunManifest run_simulate_ising(const RunConfig& cfg) {
    check_common(cfg);
    const auto params = ModelParams::make(cfg.beta, cfg.lambda, cfg.n);
    SampleSchedule sch = SampleSchedule::defaults_for(cfg.n, cfg.samples, cfg.thin);
    if (cfg.burnin >= 0) sch.burnin_sweeps = cfg.burnin;
    if (cfg.sweeps > 0) sch.thinning = std::max(1L, cfg.sweeps / cfg.samples);
    sch.validate();
    prepare_out(cfg);
    const auto started = utc_now();
    const auto th = DiagnosticThresholds::defaults(cfg.n);

    struct Record {
        InterfaceProfile profile;
        int diameter = 0;
        bool hits = false;
        std::vector<Step> steps;
    };
    const std::function<Record(int, long, const SpinConfig&)> extract =
        [&](int, long, const SpinConfig& c) {
            const auto contours = trace_contours(c);
            Record r{envelopes(contours), max_closed_diameter(contours), false, {}};
            r.hits = hits_box(r.profile, th.box_half_width, th.box_height);
            try {
                r.steps = interface_walk(contours).steps();
            } catch (const NoConePoints&) {
                // recorded as a sample without steps
            }
            return r;
        };
    const auto nested = map_ensemble<Record>(params, sch, cfg.replicas, cfg.seed, worker_threads(), extract);

    CsvWriter iface(out_path(cfg, "interface.csv"), {"replica", "sample", "i", "gamma_plus", "gamma_minus"});
    CsvWriter summary(out_path(cfg, "interface_summary.csv"),
                      {"replica", "sample", "minus_area", "gamma_length", "max_closed_diameter", "hits_box"});
    CsvWriter steps(out_path(cfg, "steps.csv"), {"replica", "sample", "step_index", "theta", "zeta"});
    for (std::size_t r = 0; r < nested.size(); ++r)
        for (std::size_t s = 0; s < nested[r].size(); ++s) {
            const auto& rec = nested[r][s];
            const long rr = static_cast<long>(r), ss = static_cast<long>(s);
            for (int i = 0; i < rec.profile.columns(); ++i) {
                iface << rr << ss << (rec.profile.x_min + i) << rec.profile.gamma_plus[static_cast<std::size_t>(i)]
                      << rec.profile.gamma_minus[static_cast<std::size_t>(i)];
                iface.end_row();
            }
            summary << rr << ss << rec.profile.minus_area << rec.profile.gamma_length << rec.diameter
                    << (rec.hits ? 1 : 0);
            summary.end_row();
            for (std::size_t k = 0; k < rec.steps.size(); ++k) {
                steps << rr << ss << static_cast<long>(k + 1) << rec.steps[k].theta << rec.steps[k].zeta;
                steps.end_row();
            }
        }
    iface.close();
    summary.close();
    steps.close();
    return finish(cfg, started, {"interface.csv", "interface_summary.csv", "steps.csv"},
                  {{"contour_convention", kSplitConvention},
                   {"equilibration", equilibration_note(nested, sch)}});
}

RunManifest run_simulate_walk(const RunConfig& cfg) {
    check_common(cfg);
    if (cfg.n < 1) throw ValidationError("n must be >= 1");
    if (cfg.lambda < 0) throw ValidationError("lambda must be >= 0");
    const double m_star = spontaneous_magnetization(cfg.beta);
    const auto law = load_law(cfg.law);
    const auto tilt = TiltParams::from_model(cfg.lambda, m_star, cfg.n);
    prepare_out(cfg);
    const auto started = utc_now();
    law.write_csv(out_path(cfg, "law.csv"));
    const BridgeSampler sampler(law, tilt, {-cfg.n, 0}, {cfg.n, 0});
    const std::function<std::vector<EffectiveWalk>(int)> draw = [&](int r) {
        std::vector<EffectiveWalk> walks;
        const auto key = replica_seed(cfg.seed, r);
        for (long i = 0; i < cfg.samples; ++i) {
            CounterRng rng(derive_key(key, static_cast<std::uint64_t>(i)));
            walks.push_back(sampler.sample(rng));
        }
        return walks;
    };
    const auto nested = per_replica(cfg.replicas, worker_threads(), draw);

    CsvWriter wcsv(out_path(cfg, "walks.csv"), {"replica", "sample", "k", "T", "Z"});
    CsvWriter scsv(out_path(cfg, "walk_stats.csv"), {"replica", "sample", "area", "nsteps", "gap"});
    for (std::size_t r = 0; r < nested.size(); ++r)
        for (std::size_t s = 0; s < nested[r].size(); ++s) {
            const auto& w = nested[r][s];
            const long rr = static_cast<long>(r), ss = static_cast<long>(s);
            for (std::size_t k = 0; k < w.points.size(); ++k) {
                wcsv << rr << ss << static_cast<long>(k) << w.points[k].x << w.points[k].y;
                wcsv.end_row();
            }
            scsv << rr << ss << area(w) << static_cast<long>(w.size()) << w.gap();
            scsv.end_row();
        }
    wcsv.close();
    scsv.close();
    return finish(cfg, started, {"law.csv", "walks.csv", "walk_stats.csv"});
}

RunManifest run_fs_reference(const RunConfig& cfg) {
    check_common(cfg);
    const double chi = cfg.chi > 0 ? cfg.chi : StepLaw::default_law().chi();
    const double c = 2.0 * cfg.lambda * spontaneous_magnetization(cfg.beta) * std::sqrt(chi);
    if (!(c > 0)) throw DomainError("fs-reference needs lambda > 0");
    const FSReference ref(c);
    prepare_out(cfg);
    const auto started = utc_now();

    CsvWriter dens(out_path(cfg, "fs_reference.csv"), {"r", "phi0", "density"});
    const double r_max = (ref.params().omega[0] + 10.0) / ref.params().C;
    const int points = 400;
    for (int i = 0; i <= points; ++i) {
        const double r = r_max * i / points;
        dens << r << ref.phi(0, r) << ref.density(r);
        dens.end_row();
    }
    dens.close();

    CsvWriter kern(out_path(cfg, "fs_kernel.csv"), {"t", "r", "y", "kernel"});
    const double k_max = ref.quantile(0.999);
    const int grid = 40;
    for (double t : {0.25, 0.5, 1.0, 2.0})
        for (int i = 1; i <= grid; ++i)
            for (int j = 1; j <= grid; ++j) {
                const double r = k_max * i / grid, y = k_max * j / grid;
                kern << t << r << y << ref.transition_kernel(t, r, y, ref.params().modes(), 1.0).value;
                kern.end_row();
            }
    kern.close();
    return finish(cfg, started, {"fs_reference.csv", "fs_kernel.csv"});
}

RunManifest run_analyze(const RunConfig& cfg) {
    check_common(cfg);
    const auto in = input_dir(cfg);
    RunManifest source;
    std::string kind;
    for (const char* cmd : {"simulate-ising", "simulate-walk"}) {
        const auto p = fs::path(in) / manifest_name(cmd);
        if (fs::exists(p)) {
            source = read_manifest(p.string());
            kind = cmd;
            break;
        }
    }
    if (kind.empty()) throw ValidationError("no simulation manifest in " + in);
    verify_manifest(source, in);
    const auto& sc = source.config;
    prepare_out(cfg);
    const auto started = utc_now();

    json rep;
    rep["provenance"] = kind == "simulate-ising" ? "ising" : "walk";
    rep["source_manifest"] = manifest_name(kind);
    rep["n"] = sc.n;
    rep["beta"] = sc.beta;
    rep["lambda"] = sc.lambda;
    rep["seed"] = cfg.seed;
    rep["calibration_note"] =
        "KS and two-time thresholds at finite n are calibration choices; no convergence rate is known";
    const double m_star = spontaneous_magnetization(sc.beta);

    RescaledEnsemble ens;
    double chi = cfg.chi;
    if (kind == "simulate-ising") {
        const auto data = read_ising(in);
        rep["samples"] = data.samples.size();
        rep["samples_without_cone_points"] = data.samples.size() - data.step_walks.size();
        if (data.step_walks.size() >= 2) {
            const auto est = estimate_chi(data.step_walks);
            rep["zeta"] = {{"mean", est.mean_zeta}, {"std_error", est.mean_zeta_se}, {"steps", est.steps}};
            rep["chi_estimate"] = {{"chi", est.chi}, {"std_error", est.std_error}};
            if (!(chi > 0)) chi = est.chi;
        }
        if (!(chi > 0)) throw InsufficientData("no chi: pass --chi or provide at least two decomposable samples");
        rep["chi_source"] = cfg.chi > 0 ? "override" : "estimate";
        const auto th = DiagnosticThresholds::defaults(sc.n);
        const auto d = diagnostics(data.samples, sc.n, th);
        rep["thresholds"] = {{"kappa", th.kappa}, {"M", th.box_half_width}, {"R", th.box_height},
                             {"c_area", th.c_area}, {"c_len", th.c_len}};
        rep["diagnostics"] = {{"restricted_rate", d.restricted_rate},
                              {"repulsion_rate", d.repulsion_rate},
                              {"area_exceed_rate", d.area_exceed_rate},
                              {"length_exceed_rate", d.length_exceed_rate},
                              {"width", quantiles_json(d.width_q)},
                              {"area_over_n43", quantiles_json(d.area_q)},
                              {"length_over_n", quantiles_json(d.length_q)}};
        std::vector<InterfaceProfile> profiles;
        for (const auto& s : data.samples) profiles.push_back(s.profile);
        ens = rescale_interfaces(profiles, sc.n, chi, sc.lambda, sc.beta);
    } else {
        const auto law = StepLaw::read_csv((fs::path(in) / "law.csv").string());
        const auto walks = read_walks(in);
        rep["samples"] = walks.size();
        if (!(chi > 0)) chi = law.chi();
        rep["chi_source"] = cfg.chi > 0 ? "override" : "law";
        const auto st = ensemble_stats(walks);
        rep["walk_stats"] = {{"area", quantiles_json(st.area_q)}, {"nsteps", quantiles_json(st.nsteps_q)},
                             {"gap", quantiles_json(st.gap_q)}, {"length", quantiles_json(st.length_q)}};
        double mean = 0;
        for (const auto& w : walks) mean += height_at(w, 0.0);
        rep["mean_midpoint_height"] = mean / static_cast<double>(walks.size());
        ens = rescale_walks(walks, sc.n, chi, sc.lambda);
    }
    rep["chi"] = chi;
    const double c = 2.0 * sc.lambda * m_star * std::sqrt(chi);
    rep["fs_c"] = c;
    if (c > 0 && ens.size() >= 100) {
        fs_comparison(ens, FSReference(c), cfg.seed, rep);
    } else {
        rep["ks"] = nullptr;
        rep["two_time"] = nullptr;
        rep["fs_comparison_skipped"] = c > 0 ? "fewer than 100 samples" : "lambda = 0";
    }
    std::ofstream(out_path(cfg, "report.json"), std::ios::binary) << rep.dump(2) << "\n";
    return finish(cfg, started, {"report.json"});
}

std::string run_report(const RunConfig& cfg) {
    const auto dir = input_dir(cfg);
    if (!fs::is_directory(dir)) throw ValidationError(dir + " is not a directory");
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("manifest.", 0) == 0 && e.path().extension() == ".json") manifests.push_back(e.path());
    }
    if (manifests.empty()) throw ValidationError("no manifests in " + dir);
    std::sort(manifests.begin(), manifests.end());
    std::ostringstream out;
    for (const auto& p : manifests) {
        const auto m = read_manifest(p.string());
        verify_manifest(m, dir);
        out << p.filename().string() << ": " << m.config.command << ", " << m.outputs.size()
            << " outputs verified\n";
    }
    const auto report = fs::path(dir) / "report.json";
    if (fs::exists(report)) {
        std::ifstream in(report, std::ios::binary);
        out << in.rdbuf();
    }
    return out.str();
}

}  // namespace prewet
