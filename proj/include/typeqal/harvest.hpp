#pragma once

// Ground-truth harvesting, stub parsing, case alignment and aggregate
// metrics.

#include <algorithm>
#include <compare>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeqal/attrdb.hpp"
#include "typeqal/errors.hpp"
#include "typeqal/parallel.hpp"
#include "typeqal/pysource.hpp"
#include "typeqal/simcore.hpp"
#include "typeqal/stripper.hpp"
#include "typeqal/typeexpr.hpp"

namespace typeqal {

enum class Slot { Param, Return, Variable };

inline std::string_view to_string(Slot s) {
  switch (s) {
    case Slot::Param: return "param";
    case Slot::Return: return "return";
    case Slot::Variable: return "variable";
  }
  return "";
}

struct CaseKey {
  std::string module;  ///< relative path without extension, `/`-separated
  std::string symbol;  ///< dotted class/function path
  Slot slot = Slot::Param;
  std::string param;   ///< Param slots only

  auto operator<=>(const CaseKey&) const = default;
  bool operator==(const CaseKey&) const = default;

  std::string str() const {
    std::string out = module + ":" + symbol + ":" + std::string(to_string(slot));
    if (slot == Slot::Param) out += ":" + param;
    return out;
  }
};

struct TruthCase {
  CaseKey key;
  TypeNode truth;
};

struct Warning {
  std::string path;
  std::string message;
};

/// One annotation found in a source, before its text is parsed.
struct RawAnnotation {
  CaseKey key;
  std::string text;
  std::size_t line = 0;
};

struct SourceAnnotations {
  std::vector<RawAnnotation> annotations;
  std::size_t function_count = 0;
};

inline std::string module_name(const std::string& rel_path) {
  std::filesystem::path p(rel_path);
  p.replace_extension();
  return p.generic_string();
}

namespace detail {

class AnnotationCollector {
 public:
  AnnotationCollector(const py::Module& m, std::string module) : m_(m), module_(std::move(module)) {}

  SourceAnnotations run() {
    visit_block(m_.body(), "", false);
    return std::move(out_);
  }

 private:
  void record(const std::string& symbol, Slot slot, const std::string& param, std::size_t first, std::size_t last) {
    out_.annotations.push_back({{module_, symbol, slot, param},
                                std::string(m_.span_text(first, last)),
                                m_.lines().line_of(m_.tokens()[first].begin)});
  }

  std::string function_symbol(const std::string& qualname, const std::vector<std::string>& decorators) {
    for (const auto& d : decorators) {
      if (d == "overload" || d == "typing.overload" || d == "typing_extensions.overload") {
        return qualname + "#overload" + std::to_string(++overloads_[qualname]);
      }
      if (d.ends_with(".setter")) return qualname + "#setter";
      if (d.ends_with(".deleter")) return qualname + "#deleter";
    }
    return qualname;
  }

  void visit_block(const std::vector<py::Statement>& body, const std::string& prefix, bool in_class) {
    std::vector<std::string> decorators;
    for (const auto& s : body) {
      if (s.kind == py::Statement::Kind::Decorator) {
        decorators.push_back(m_.decorator_text(s));
        continue;
      }
      if (m_.is_function(s)) {
        if (const auto h = m_.function_header(s)) visit_function(*h, prefix, in_class, decorators);
      } else if (m_.is_class(s)) {
        const auto sig = m_.significant(s.first, s.last);
        if (sig.size() > 1) visit_block(s.body, prefix + std::string(m_.text(sig[1])) + ".", true);
      } else if (s.kind == py::Statement::Kind::Compound) {
        visit_block(s.body, prefix, in_class);
      } else if (const auto a = m_.annotated_assignment(s); a && a->simple_name) {
        record(prefix + std::string(m_.text(a->target_first)), Slot::Variable, "", a->ann_first, a->ann_last);
      }
      decorators.clear();
    }
  }

  void visit_function(const py::FunctionHeader& h, const std::string& prefix, bool in_class,
                      const std::vector<std::string>& decorators) {
    ++out_.function_count;
    const std::string symbol = function_symbol(prefix + std::string(m_.text(h.name)), decorators);
    bool first = true;
    for (const auto& p : h.params) {
      if (p.marker) continue;
      const std::string name(m_.text(p.name));
      const bool skip = first && in_class && (name == "self" || name == "cls");
      first = false;
      if (skip || !p.colon) continue;
      record(symbol, Slot::Param, name, p.ann_first, p.ann_last);
    }
    if (h.arrow) record(symbol, Slot::Return, "", h.ret_first, h.ret_last);
  }

  const py::Module& m_;
  std::string module_;
  SourceAnnotations out_;
  std::map<std::string, int> overloads_;
};

}  // namespace detail

/// Annotated parameters (except a leading self/cls in classes), returns, and
/// module- or class-level variables. Function bodies are not entered.
/// Throws SyntaxError.
inline SourceAnnotations collect_annotations(const std::string& module, std::string source) {
  const py::Module m(std::move(source));
  return detail::AnnotationCollector(m, module).run();
}

struct TruthSet {
  std::vector<TruthCase> cases;  ///< sorted by key, unique
  std::size_t function_count = 0;
  std::vector<Warning> warnings;
};

using PredictionMap = std::map<CaseKey, TypeNode>;

struct StubSet {
  PredictionMap predictions;
  std::vector<Warning> warnings;
};

namespace detail {

struct FileAnnotations {
  std::string rel;
  std::optional<SourceAnnotations> found;
  std::string error;
};

inline std::vector<FileAnnotations> scan_tree(const std::filesystem::path& root, std::string_view ext, unsigned jobs) {
  if (!std::filesystem::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<FileAnnotations> files;
  for (auto& rel : list_files(root)) {
    if (std::filesystem::path(rel).extension() == ext) files.push_back({rel, std::nullopt, ""});
  }
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    try {
      files[i].found = collect_annotations(module_name(files[i].rel), read_text_file(root / files[i].rel));
    } catch (const std::exception& e) {
      files[i].error = e.what();
    }
  });
  return files;
}

// Parses annotation texts into a key map; duplicates resolve to the last one.
inline void absorb(const FileAnnotations& f, std::map<CaseKey, TypeNode>& into, std::vector<Warning>& warnings) {
  std::map<CaseKey, TypeNode> local;
  for (const auto& a : f.found->annotations) {
    try {
      TypeNode t = parse_type(a.text);
      if (local.contains(a.key)) warnings.push_back({f.rel, "duplicate definition of " + a.key.str() + "; last one wins"});
      local.insert_or_assign(a.key, std::move(t));
    } catch (const ParseError& e) {
      local.erase(a.key);
      warnings.push_back({f.rel, "line " + std::to_string(a.line) + ": unparseable annotation '" + a.text + "': " + e.what()});
    }
  }
  for (auto& [k, v] : local) into.insert_or_assign(k, std::move(v));
}

}  // namespace detail

/// Ground-truth cases from every `.py` file under repo. Files that fail to
/// parse are skipped with a warning.
inline TruthSet harvest_truth(const std::filesystem::path& repo, unsigned jobs = default_jobs()) {
  TruthSet out;
  std::map<CaseKey, TypeNode> cases;
  for (const auto& f : detail::scan_tree(repo, ".py", jobs)) {
    if (!f.found) {
      out.warnings.push_back({f.rel, f.error});
      continue;
    }
    out.function_count += f.found->function_count;
    detail::absorb(f, cases, out.warnings);
  }
  for (auto& [k, v] : cases) out.cases.push_back({k, std::move(v)});
  return out;
}

/// Predictions from every `.pyi` file under dir, keyed like harvest_truth.
/// A stub that fails to parse contributes nothing and is reported.
inline StubSet parse_stub_dir(const std::filesystem::path& dir, unsigned jobs = default_jobs()) {
  StubSet out;
  for (const auto& f : detail::scan_tree(dir, ".pyi", jobs)) {
    if (!f.found) {
      out.warnings.push_back({f.rel, f.error});
      continue;
    }
    detail::absorb(f, out.predictions, out.warnings);
  }
  return out;
}

struct CaseRecord {
  CaseKey key;
  TypeNode truth;
  std::optional<TypeNode> prediction;
  double sim = 0.0;
  unsigned depth = 1;
  bool rare = false;
  bool exact = false;
};

inline constexpr unsigned kMaxDepthBucket = 5;

struct RepoMetrics {
  double typesim_overall = 0.0;
  double typesim_wo_missing = 0.0;
  double missing_rate = 0.0;
  std::optional<double> typesim_rare;  ///< unset when no case is rare
  std::map<unsigned, double> exact_by_depth;    ///< bucket 5 holds depth >= 5
  std::map<unsigned, double> typesim_by_depth;
  std::size_t case_count = 0;
  std::size_t missing_count = 0;
  std::size_t rare_count = 0;
  std::size_t function_count = 0;
};

struct Evaluation {
  std::vector<CaseRecord> cases;
  RepoMetrics metrics;
};

/// Aggregates over case records. Missing predictions count as similarity 0
/// and as non-exact everywhere except typesim_wo_missing, which averages
/// over matched cases only (0 when nothing matched).
inline RepoMetrics aggregate(const std::vector<CaseRecord>& cases, std::size_t function_count = 0) {
  RepoMetrics m;
  m.case_count = cases.size();
  m.function_count = function_count;
  std::vector<double> all, matched, rare;
  std::map<unsigned, std::vector<double>> sims_by_depth;
  std::map<unsigned, std::size_t> exact_by_depth;
  for (const auto& c : cases) {
    const double s = c.prediction ? c.sim : 0.0;
    all.push_back(s);
    if (c.prediction) matched.push_back(s);
    if (c.rare) rare.push_back(s);
    const unsigned bucket = std::min(c.depth, kMaxDepthBucket);
    sims_by_depth[bucket].push_back(s);
    exact_by_depth[bucket] += c.prediction && c.exact ? 1 : 0;
  }
  m.missing_count = all.size() - matched.size();
  m.rare_count = rare.size();
  const auto mean = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto n = static_cast<double>(v.size());
    return TypeSimilarity::sum_ascending(std::move(v)) / n;
  };
  if (!all.empty()) {
    m.typesim_overall = mean(all);
    m.missing_rate = static_cast<double>(m.missing_count) / static_cast<double>(all.size());
  }
  m.typesim_wo_missing = mean(matched);
  if (!rare.empty()) m.typesim_rare = mean(rare);
  for (auto& [bucket, sims] : sims_by_depth) {
    m.exact_by_depth[bucket] = static_cast<double>(exact_by_depth[bucket]) / static_cast<double>(sims.size());
    m.typesim_by_depth[bucket] = mean(sims);
  }
  return m;
}

inline Evaluation evaluate(const std::vector<TruthCase>& truth, const PredictionMap& preds, const AttributeDatabase& db,
                           std::size_t rare_threshold = 1, std::size_t function_count = 0,
                           NameMatch mode = NameMatch::LastSegment) {
  const TypeSimilarity sim(db, mode);
  std::map<std::string, std::size_t> frequency;
  for (const auto& t : truth) ++frequency[render(t.truth)];
  Evaluation out;
  for (const auto& t : truth) {
    CaseRecord r;
    r.key = t.key;
    r.truth = t.truth;
    r.depth = depth(t.truth);
    r.rare = frequency[render(t.truth)] <= rare_threshold;
    if (const auto it = preds.find(t.key); it != preds.end()) {
      r.prediction = it->second;
      r.sim = sim(t.truth, it->second);
      r.exact = exact_match(t.truth, it->second);
    }
    out.cases.push_back(std::move(r));
  }
  std::sort(out.cases.begin(), out.cases.end(), [](const CaseRecord& a, const CaseRecord& b) { return a.key < b.key; });
  out.metrics = aggregate(out.cases, function_count);
  return out;
}

inline nlohmann::json metrics_json(const RepoMetrics& m) {
  nlohmann::json j;
  j["typesim_overall"] = m.typesim_overall;
  j["typesim_wo_missing"] = m.typesim_wo_missing;
  j["missing_rate"] = m.missing_rate;
  j["typesim_rare"] = m.typesim_rare ? nlohmann::json(*m.typesim_rare) : nlohmann::json(nullptr);
  j["exact_by_depth"] = nlohmann::json::object();
  j["typesim_by_depth"] = nlohmann::json::object();
  for (const auto& [d, v] : m.exact_by_depth) j["exact_by_depth"][std::to_string(d)] = v;
  for (const auto& [d, v] : m.typesim_by_depth) j["typesim_by_depth"][std::to_string(d)] = v;
  j["case_count"] = m.case_count;
  j["missing_count"] = m.missing_count;
  j["rare_count"] = m.rare_count;
  j["function_count"] = m.function_count;
  return j;
}

inline nlohmann::json report_json(const std::string& repo, const Evaluation& e,
                                  const std::vector<Warning>& warnings = {}) {
  nlohmann::json j;
  j["repo"] = repo;
  j["metrics"] = metrics_json(e.metrics);
  j["cases"] = nlohmann::json::array();
  for (const auto& c : e.cases) {
    nlohmann::json r;
    r["module"] = c.key.module;
    r["symbol"] = c.key.symbol;
    r["slot"] = to_string(c.key.slot);
    r["param"] = c.key.slot == Slot::Param ? nlohmann::json(c.key.param) : nlohmann::json(nullptr);
    r["truth"] = render(c.truth);
    r["prediction"] = c.prediction ? nlohmann::json(render(*c.prediction)) : nlohmann::json(nullptr);
    r["missing"] = !c.prediction.has_value();
    r["sim"] = c.prediction ? c.sim : 0.0;
    r["depth"] = c.depth;
    r["rare"] = c.rare;
    r["exact"] = c.exact;
    j["cases"].push_back(std::move(r));
  }
  j["warnings"] = nlohmann::json::array();
  for (const auto& w : warnings) j["warnings"].push_back({{"path", w.path}, {"message", w.message}});
  return j;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string report_csv(const Evaluation& e) {
  std::ostringstream out;
  out << "module,symbol,slot,param,truth,prediction,missing,sim,depth,rare,exact\n";
  for (const auto& c : e.cases) {
    char sim[32];
    std::snprintf(sim, sizeof sim, "%.6f", c.prediction ? c.sim : 0.0);
    out << csv_field(c.key.module) << ',' << csv_field(c.key.symbol) << ',' << to_string(c.key.slot) << ','
        << csv_field(c.key.param) << ',' << csv_field(render(c.truth)) << ','
        << (c.prediction ? csv_field(render(*c.prediction)) : "") << ',' << (c.prediction ? "false" : "true") << ','
        << sim << ',' << c.depth << ',' << (c.rare ? "true" : "false") << ',' << (c.exact ? "true" : "false") << '\n';
  }
  return out.str();
}

namespace detail {

class StubWriter {
 public:
  explicit StubWriter(const py::Module& m) : m_(m) {}

  std::string run() {
    for (const auto& s : m_.body()) {
      const auto sig = m_.significant(s.first, s.last);
      if (s.kind == py::Statement::Kind::Simple && !sig.empty() &&
          (m_.is_name(sig[0], "import") || m_.is_name(sig[0], "from"))) {
        out_ << collapse(m_.span_text(s.first, s.last)) << '\n';
      }
    }
    block(m_.body(), 0);
    return out_.str();
  }

 private:
  static std::string collapse(std::string_view text) {
    std::string out;
    bool space = false;
    for (char c : text) {
      if (c == '\\') continue;
      if (c == '\n' || c == '\r' || c == ' ' || c == '\t') {
        space = true;
        continue;
      }
      if (space && !out.empty() && out.back() != '(' && c != ')' && c != ',') out += ' ';
      space = false;
      out += c;
    }
    return out;
  }

  // Header text with comments dropped and lines joined.
  std::string header(const py::Statement& s) const {
    std::string out;
    std::size_t prev_end = std::string::npos;
    for (std::size_t t : m_.significant(s.first, s.last)) {
      const auto& tok = m_.tokens()[t];
      if (prev_end != std::string::npos && tok.begin > prev_end) {
        const std::string_view gap = std::string_view(m_.source()).substr(prev_end, tok.begin - prev_end);
        if (gap.find_first_of(" \t\n\r#\\") != std::string_view::npos && !out.empty() && out.back() != '(' &&
            out.back() != '[' && !m_.is_op(t, ")") && !m_.is_op(t, "]") && !m_.is_op(t, ",") && !m_.is_op(t, ":")) {
          out += ' ';
        }
      }
      out += m_.text(t);
      prev_end = tok.end;
    }
    return out;
  }

  // Returns whether anything was written.
  bool block(const std::vector<py::Statement>& body, int level) {
    const std::string pad(static_cast<std::size_t>(level) * 4, ' ');
    bool wrote = false;
    std::vector<const py::Statement*> decorators;
    for (const auto& s : body) {
      if (s.kind == py::Statement::Kind::Decorator) {
        decorators.push_back(&s);
        continue;
      }
      if (m_.is_function(s)) {
        for (const auto* d : decorators) out_ << pad << '@' << m_.decorator_text(*d) << '\n';
        out_ << pad << header(s) << " ...\n";
        wrote = true;
      } else if (m_.is_class(s)) {
        for (const auto* d : decorators) out_ << pad << '@' << m_.decorator_text(*d) << '\n';
        out_ << pad << header(s) << '\n';
        if (!block(s.body, level + 1)) out_ << pad << "    ...\n";
        wrote = true;
      } else if (s.kind == py::Statement::Kind::Compound) {
        wrote = block(s.body, level) || wrote;
      } else if (const auto a = m_.annotated_assignment(s); a && a->simple_name) {
        out_ << pad << m_.text(a->target_first) << ": " << collapse(m_.span_text(a->ann_first, a->ann_last)) << '\n';
        wrote = true;
      }
      decorators.clear();
    }
    return wrote;
  }

  const py::Module& m_;
  std::ostringstream out_;
};

}  // namespace detail

/// Stub text for a typed source: imports, signatures with `...` bodies, and
/// module/class variable declarations. Harvesting the stub yields the same
/// cases as harvesting the source. Throws SyntaxError.
inline std::string extract_stub(std::string source) {
  const py::Module m(std::move(source));
  return detail::StubWriter(m).run();
}

}  // namespace typeqal
