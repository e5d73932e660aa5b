#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coherence_kit.h"
#include "document.hpp"

namespace cktool {
namespace {

struct ChannelDeleter {
  void operator()(ck_channel* p) const { ck_channel_destroy(p); }
};
struct MixtureDeleter {
  void operator()(ck_pio_mixture* p) const { ck_pio_mixture_destroy(p); }
};
struct CloudDeleter {
  void operator()(ck_cloud* p) const { ck_cloud_destroy(p); }
};
using ChannelPtr = std::unique_ptr<ck_channel, ChannelDeleter>;
using MixturePtr = std::unique_ptr<ck_pio_mixture, MixtureDeleter>;
using CloudPtr = std::unique_ptr<ck_cloud, CloudDeleter>;

// Carries an exit code out of a command; message goes to stderr.
struct Failure {
  int code;
  std::string message;
};

int exit_for(ck_status s) {
  switch (s) {
    case CK_OK: return kOk;
    case CK_INCOMPLETE_CHANNEL: return kNotTracePreserving;
    case CK_NOT_INCOHERENT: return kNotIncoherent;
    case CK_TARGET_UNREACHABLE:
    case CK_DEGENERATE_SOURCE: return kUnreachable;
    case CK_UNSUPPORTED_CLASS: return kUsage;
    default: return kInvalidInput;
  }
}

void check(ck_status s, const std::string& context) {
  if (s != CK_OK) throw Failure{exit_for(s), context + ": " + ck_status_name(s) + ": " + ck_last_error()};
}

ck_state state_arg(const std::string& text, const char* flag) {
  auto raw = parse_state_text(text);
  if (!raw) throw Failure{kInvalidInput, std::string(flag) + ": expected z,r or z,r,theta, got '" + text + "'"};
  ck_state s{};
  check(ck_state_make(raw->z, raw->r, raw->theta, &s), flag);
  return s;
}

ck_class class_arg(const std::string& name) {
  if (name == "io") return CK_CLASS_IO;
  if (name == "sio") return CK_CLASS_SIO;
  if (name == "pio") return CK_CLASS_PIO;
  return CK_CLASS_CPO;
}

ChannelDocument load(const std::string& path) {
  try {
    return read_document(path);
  } catch (const DocumentError& e) {
    throw Failure{kInvalidInput, path + ": " + e.what()};
  }
}

ChannelPtr make_channel(const ChannelDocument& doc) {
  ck_channel* ch = nullptr;
  check(ck_channel_create(doc.kraus.data(), doc.kraus.size(), &ch), "channel");
  return ChannelPtr(ch);
}

std::vector<ck_matrix> operators_of(const ck_channel* ch) {
  std::vector<ck_matrix> ops(ck_channel_size(ch));
  for (std::size_t i = 0; i < ops.size(); ++i) check(ck_channel_operator(ch, i, &ops[i]), "channel");
  return ops;
}

// Runs emit against --out when given, otherwise against the fallback stream.
template <typename F>
void with_output(const std::string& path, std::ostream& fallback, F&& emit) {
  if (path.empty()) {
    emit(fallback);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Failure{kInvalidInput, "cannot write " + path};
  emit(static_cast<std::ostream&>(os));
  if (!os) throw Failure{kInvalidInput, "write failed: " + path};
}

Json point_json(ck_point p) { return Json::array({p.z, p.r}); }

struct RegionArgs {
  std::string cls, from, to, out, format = "json";
  std::size_t boundary = 0;
};

int cmd_region(const RegionArgs& a, std::ostream& out) {
  const ck_class kind = class_arg(a.cls);
  const ck_state from = state_arg(a.from, "--from");
  const ck_point fp{from.z, from.r};

  if (!a.to.empty()) {
    const ck_state to = state_arg(a.to, "--to");
    ck_region_report rep{};
    check(ck_region_contains(kind, fp, {to.z, to.r}, &rep), "region");
    Json j = Json::object();
    j["class"] = ck_class_name(kind);
    j["from"] = state_json(from);
    j["to"] = state_json(to);
    j["verdict"] = rep.verdict != 0;
    j["margin"] = rep.margin;
    j["binding_constraint"] = ck_binding_name(rep.binding);
    if (rep.binding == CK_BINDING_HEXAGON_EDGE) j["edge_index"] = rep.edge_index;
    with_output(a.out, out, [&](std::ostream& os) { write_json(os, j); });
    return rep.verdict ? kOk : kUnreachable;
  }

  const std::size_t capacity = kind == CK_CLASS_CPO ? std::max<std::size_t>(a.boundary, 4) : a.boundary;
  std::vector<ck_point> pts(capacity);
  std::size_t written = 0;
  check(ck_region_boundary(kind, fp, capacity, pts.data(), &written), "region");
  pts.resize(written);
  with_output(a.out, out, [&](std::ostream& os) {
    if (a.format == "csv") {
      os << "z,r\n";
      for (const auto& p : pts) os << format_double(p.z) << ',' << format_double(p.r) << '\n';
    } else {
      Json arr = Json::array();
      for (const auto& p : pts) arr.push_back(point_json(p));
      write_json(os, arr);
    }
  });
  return kOk;
}

struct SynthArgs {
  std::string cls, from, to, out, label;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const ck_class kind = class_arg(a.cls);
  const ck_state from = state_arg(a.from, "--from");
  const ck_state to = state_arg(a.to, "--to");

  ChannelDocument doc;
  doc.metadata["label"] = a.label.empty() ? "synth-" + a.cls : a.label;
  doc.metadata["class"] = ck_class_name(kind);
  doc.metadata["source"] = state_json(from);
  doc.metadata["target"] = state_json(to);

  ck_channel* raw = nullptr;
  ck_status st = CK_OK;
  if (kind == CK_CLASS_IO) {
    ck_synthesis_solution sol{};
    st = ck_synth_io(from, to, &raw, &sol);
    if (st == CK_OK) {
      Json s = Json::object();
      s["alpha"] = sol.alpha;
      s["beta"] = sol.beta;
      s["lambda"] = sol.lambda;
      s["theta"] = sol.theta_param;
      s["phi"] = sol.phi;
      s["case"] = sol.case_index;
      s["alpha_tilde"] = sol.alpha_tilde;
      s["beta_tilde"] = sol.beta_tilde;
      doc.metadata["solution"] = std::move(s);
    }
  } else if (kind == CK_CLASS_CPO) {
    st = ck_synth_cpo(from, to, &raw);
  } else {
    ck_pio_mixture* mraw = nullptr;
    st = ck_synth_pio(from, to, &mraw);
    if (st == CK_OK) {
      MixturePtr mix(mraw);
      Json entries = Json::array();
      for (std::size_t i = 0; i < ck_pio_mixture_size(mix.get()); ++i) {
        ck_pio_entry e{};
        check(ck_pio_mixture_entry(mix.get(), i, &e), "synth");
        Json je = Json::object();
        je["weight"] = e.weight;
        je["family"] = ck_pio_family_name(e.family);
        je["phases"] = Json::array({e.phases[0], e.phases[1]});
        entries.push_back(std::move(je));
      }
      doc.metadata["mixture"] = std::move(entries);
      st = ck_pio_mixture_channel(mix.get(), &raw);
    }
  }
  ChannelPtr ch(raw);

  if (st == CK_TARGET_UNREACHABLE || st == CK_DEGENERATE_SOURCE) {
    // A verdict, not an error: report on stdout and keep stderr quiet.
    Json j = Json::object();
    j["reachable"] = false;
    j["class"] = ck_class_name(kind);
    j["from"] = state_json(from);
    j["to"] = state_json(to);
    j["reason"] = ck_last_error();
    write_json(out, j);
    return kUnreachable;
  }
  check(st, "synth");
  doc.kraus = operators_of(ch.get());
  with_output(a.out, out, [&](std::ostream& os) { write_json(os, to_json(doc)); });
  return kOk;
}

struct ConvertArgs {
  std::string channel, state, out;
};

int cmd_convert_sio(const ConvertArgs& a, std::ostream& out) {
  const ChannelDocument in = load(a.channel);
  const ck_state state = state_arg(a.state, "--state");
  ChannelPtr ch = make_channel(in);

  ck_channel* raw = nullptr;
  ck_sio_solution sol{};
  check(ck_io_to_sio(ch.get(), state, &raw, &sol), "convert-sio");
  ChannelPtr conv(raw);

  ChannelDocument doc;
  doc.metadata["label"] = "convert-sio";
  doc.metadata["class"] = "SIO";
  doc.metadata["state"] = state_json(state);
  Json s = Json::object();
  s["converted"] = sol.converted != 0;
  s["a"] = complex_json(sol.a);
  s["b"] = complex_json(sol.b);
  s["c"] = complex_json(sol.c);
  s["d"] = complex_json(sol.d);
  s["h1"] = sol.h1;
  s["h2"] = sol.h2;
  doc.metadata["solution"] = std::move(s);
  doc.kraus = operators_of(conv.get());
  with_output(a.out, out, [&](std::ostream& os) { write_json(os, to_json(doc)); });
  return kOk;
}

int cmd_verify(const std::string& path, std::ostream& out) {
  const ChannelDocument doc = load(path);
  ChannelPtr ch = make_channel(doc);
  ck_classification c{};
  check(ck_channel_classify(ch.get(), &c), "verify");

  Json j = Json::object();
  const bool tp = c.kind != CK_CLASS_NOT_TRACE_PRESERVING;
  j["trace_preserving"] = tp;
  j["residual"] = c.completeness_residual;
  j["class"] = ck_class_name(c.kind);
  Json fam = Json::array();
  for (int k = CK_K1; k <= CK_K6; ++k) {
    if (c.family_mask & (1u << (k - 1))) fam.push_back(ck_pio_family_name(static_cast<ck_pio_family>(k)));
  }
  j["pio_families"] = std::move(fam);
  write_json(out, j);
  if (!tp) return kNotTracePreserving;
  if (c.kind == CK_CLASS_NOT_INCOHERENT) return kNotIncoherent;
  return kOk;
}

int cmd_apply(const std::string& path, const std::string& state_text, std::ostream& out) {
  const ChannelDocument doc = load(path);
  const ck_state in = state_arg(state_text, "--state");
  ChannelPtr ch = make_channel(doc);
  double residual = 0.0;
  check(ck_channel_completeness_residual(ch.get(), &residual), "apply");
  if (residual > 1e-9) throw Failure{kNotTracePreserving, "apply: channel is not trace preserving"};
  ck_state res{};
  check(ck_channel_apply(ch.get(), in, &res), "apply");
  Json j = Json::object();
  j["input"] = state_json(in);
  j["output"] = state_json(res);
  write_json(out, j);
  return kOk;
}

struct SampleArgs {
  std::string from, out;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  bool has_seed = false;
  unsigned max_kraus = 4;
};

std::uint64_t seed_from_env() {
  const char* env = std::getenv("COHERENCE_KIT_SEED");
  if (!env || !*env) return 0;
  std::uint64_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto res = std::from_chars(env, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Failure{kInvalidInput, std::string("COHERENCE_KIT_SEED is not an unsigned integer: ") + env};
  }
  return v;
}

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
  const ck_state from = state_arg(a.from, "--from");
  const std::uint64_t seed = a.has_seed ? a.seed : seed_from_env();
  ck_cloud* raw = nullptr;
  check(ck_cloud_sample(from, a.n, seed, a.max_kraus, &raw), "sample");
  CloudPtr cloud(raw);
  ck_cloud_check chk{};
  check(ck_cloud_audit(cloud.get(), &chk), "sample");

  const ck_point* pts = ck_cloud_points(cloud.get());
  const std::size_t n = ck_cloud_size(cloud.get());
  with_output(a.out, out, [&](std::ostream& os) {
    os << "z,r\n";
    for (std::size_t i = 0; i < n; ++i) os << format_double(pts[i].z) << ',' << format_double(pts[i].r) << '\n';
  });

  Json j = Json::object();
  j["source"] = state_json(from);
  j["n"] = n;
  j["seed"] = seed;
  j["max_kraus"] = a.max_kraus;
  j["violations"] = chk.violations;
  j["monotonicity_violations"] = chk.monotonicity_violations;
  j["worst_margin"] = chk.worst_margin;
  j["coverage"] = chk.coverage;
  write_json(a.out.empty() ? err : out, j);
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-qubit coherence transformations under IO, SIO, PIO and CPO", "coherence-kit"};
  app.require_subcommand(1);
  const std::vector<std::string> classes{"io", "sio", "pio", "cpo"};

  RegionArgs region;
  auto* r = app.add_subcommand("region", "Region membership or boundary enumeration");
  r->add_option("--class", region.cls, "Operation class")->required()->check(CLI::IsMember(classes));
  r->add_option("--from", region.from, "Source state z,r[,theta]")->required();
  auto* to_opt = r->add_option("--to", region.to, "Target state for a membership query");
  auto* bd_opt = r->add_option("--boundary", region.boundary, "Number of boundary points")->check(CLI::PositiveNumber);
  to_opt->excludes(bd_opt);
  r->add_option("--out", region.out, "Output file (default stdout)");
  r->add_option("--format", region.format, "Boundary format")->check(CLI::IsMember({"json", "csv"}));

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Construct a channel between two states");
  s->add_option("--class", synth.cls, "Operation class")->required()->check(CLI::IsMember({"io", "pio", "cpo"}));
  s->add_option("--from", synth.from, "Source state z,r[,theta]")->required();
  s->add_option("--to", synth.to, "Target state z,r[,theta]")->required();
  s->add_option("--out", synth.out, "Output document (default stdout)");
  s->add_option("--label", synth.label, "Document label");

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert-sio", "Replace an IO channel by an SIO one with the same action on a state");
  c->add_option("--channel", conv.channel, "Channel document")->required();
  c->add_option("--state", conv.state, "Input state z,r[,theta]")->required();
  c->add_option("--out", conv.out, "Output document (default stdout)");

  std::string verify_path;
  auto* v = app.add_subcommand("verify", "Check completeness and classify a channel document");
  v->add_option("--channel", verify_path, "Channel document")->required();

  std::string apply_path, apply_state;
  auto* ap = app.add_subcommand("apply", "Apply a channel document to a state");
  ap->add_option("--channel", apply_path, "Channel document")->required();
  ap->add_option("--state", apply_state, "Input state z,r[,theta]")->required();

  SampleArgs sample;
  auto* sm = app.add_subcommand("sample", "Monte-Carlo cloud of IO outputs as CSV");
  sm->add_option("--from", sample.from, "Source state z,r[,theta]")->required();
  sm->add_option("--n", sample.n, "Number of sampled channels")->check(CLI::PositiveNumber);
  auto* seed_opt = sm->add_option("--seed", sample.seed, "Seed (default: $COHERENCE_KIT_SEED, else 0)");
  sm->add_option("--max-kraus", sample.max_kraus, "Largest Kraus count per channel")->check(CLI::Range(2u, 64u));
  sm->add_option("--out", sample.out, "CSV file (default stdout; summary then goes to stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (r->parsed()) {
      if (region.to.empty() == (region.boundary == 0)) {
        err << "region: exactly one of --to or --boundary is required\n";
        return kUsage;
      }
      return cmd_region(region, out);
    }
    if (s->parsed()) return cmd_synth(synth, out);
    if (c->parsed()) return cmd_convert_sio(conv, out);
    if (v->parsed()) return cmd_verify(verify_path, out);
    if (ap->parsed()) return cmd_apply(apply_path, apply_state, out);
    sample.has_seed = seed_opt->count() > 0;
    return cmd_sample(sample, out, err);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  }
}

}  // namespace cktool
