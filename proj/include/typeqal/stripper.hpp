#pragma once

// Removes type annotations from Python sources by byte-span edits.

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "typeqal/errors.hpp"
#include "typeqal/parallel.hpp"
#include "typeqal/pysource.hpp"

namespace typeqal {

enum class EditReason { ParamAnnotation, ReturnAnnotation, VariableAnnotation, DocstringTypeHint };

inline std::string_view to_string(EditReason r) {
  switch (r) {
    case EditReason::ParamAnnotation: return "ParamAnnotation";
    case EditReason::ReturnAnnotation: return "ReturnAnnotation";
    case EditReason::VariableAnnotation: return "VariableAnnotation";
    case EditReason::DocstringTypeHint: return "DocstringTypeHint";
  }
  return "";
}

struct StripEdit {
  std::string path;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string replacement;
  EditReason reason = EditReason::ParamAnnotation;
};

struct StrippedFile {
  std::string original;
  std::vector<StripEdit> edits;
  std::string result;
};

/// Edits must be sorted and non-overlapping.
inline std::string apply_edits(std::string_view original, const std::vector<StripEdit>& edits) {
  std::string out;
  out.reserve(original.size());
  std::size_t pos = 0;
  for (const auto& e : edits) {
    out.append(original.substr(pos, e.start - pos));
    out += e.replacement;
    pos = e.end;
  }
  out.append(original.substr(pos));
  return out;
}

namespace detail {

struct Line {
  std::size_t begin;  // offset of first character
  std::size_t end;    // offset of '\n' or content end
};

inline std::vector<Line> split_lines(std::string_view text, std::size_t base) {
  std::vector<Line> lines;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::size_t e = i;
      if (e > b && text[e - 1] == '\r') --e;
      lines.push_back({base + b, base + e});
      b = i + 1;
    }
  }
  return lines;
}

inline std::size_t indent_of(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_param_section(std::string_view title) {
  static constexpr std::array<std::string_view, 10> kSections = {
      "Args", "Arguments", "Parameters", "Params", "Keyword Args", "Keyword Arguments",
      "Attributes", "Other Parameters", "Kwargs", "Other Args"};
  return std::find(kSections.begin(), kSections.end(), title) != kSections.end();
}

inline bool is_dash_rule(std::string_view s) {
  s = trim(s);
  return s.size() >= 3 && std::all_of(s.begin(), s.end(), [](char c) { return c == '-'; });
}

// Length of a (possibly starred) identifier at the start of s.
inline std::size_t param_name_length(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && i < 2 && s[i] == '*') ++i;
  const std::size_t start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  if (i == start || std::isdigit(static_cast<unsigned char>(s[start]))) return 0;
  return i;
}

// Google style: `name (type): desc` inside an argument section. Returns the
// span of ` (type)` relative to the line, or npos.
inline std::pair<std::size_t, std::size_t> google_hint(std::string_view line) {
  const std::size_t ind = indent_of(line);
  const std::size_t name_len = param_name_length(line.substr(ind));
  if (name_len == 0) return {std::string_view::npos, 0};
  const std::size_t name_end = ind + name_len;
  std::size_t i = name_end;
  while (i < line.size() && line[i] == ' ') ++i;
  if (i >= line.size() || line[i] != '(') return {std::string_view::npos, 0};
  int depth = 0;
  for (; i < line.size(); ++i) {
    if (line[i] == '(' || line[i] == '[') ++depth;
    if ((line[i] == ')' || line[i] == ']') && --depth == 0) break;
  }
  if (i >= line.size() || line[i] != ')') return {std::string_view::npos, 0};
  const std::size_t close = i + 1;
  std::size_t j = close;
  while (j < line.size() && line[j] == ' ') ++j;
  if (j >= line.size() || line[j] != ':') return {std::string_view::npos, 0};
  return {name_end, close};
}

// NumPy style: `name : type` at section indentation. Returns the span of
// ` : type` relative to the line, or npos.
inline std::pair<std::size_t, std::size_t> numpy_hint(std::string_view line) {
  const std::size_t ind = indent_of(line);
  std::size_t i = ind;
  // Allow `x, y : int`.
  while (true) {
    const std::size_t n = param_name_length(line.substr(i));
    if (n == 0) return {std::string_view::npos, 0};
    i += n;
    std::size_t j = i;
    while (j < line.size() && line[j] == ' ') ++j;
    if (j < line.size() && line[j] == ',') {
      ++j;
      while (j < line.size() && line[j] == ' ') ++j;
      i = j;
      continue;
    }
    break;
  }
  const std::size_t name_end = i;
  if (i >= line.size() || line[i] != ' ') return {std::string_view::npos, 0};
  while (i < line.size() && line[i] == ' ') ++i;
  if (i >= line.size() || line[i] != ':' || i + 1 >= line.size() || line[i + 1] != ' ') return {std::string_view::npos, 0};
  std::size_t end = line.size();
  while (end > i && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
  if (trim(line.substr(i + 1, end - i - 1)).empty()) return {std::string_view::npos, 0};
  return {name_end, end};
}

inline void docstring_hints(std::string_view src, std::size_t tok_begin, std::size_t tok_end,
                            std::vector<StripEdit>& edits) {
  const std::string_view tok = src.substr(tok_begin, tok_end - tok_begin);
  const std::size_t q = tok.find_first_of("'\"");
  const bool triple = tok.size() >= q + 6 && tok[q + 1] == tok[q] && tok[q + 2] == tok[q];
  const std::size_t open = q + (triple ? 3 : 1);
  const std::size_t close = tok.size() - (triple ? 3 : 1);
  if (close <= open) return;
  const auto lines = split_lines(tok.substr(open, close - open), tok_begin + open);

  enum class Mode { None, Google, Numpy };
  Mode mode = Mode::None;
  std::size_t section_indent = 0;
  std::size_t entry_indent = std::string_view::npos;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string_view line = src.substr(lines[k].begin, lines[k].end - lines[k].begin);
    const std::string_view body = trim(line);
    const std::size_t ind = indent_of(line);
    const bool numpy_header = k + 1 < lines.size() &&
                              is_dash_rule(src.substr(lines[k + 1].begin, lines[k + 1].end - lines[k + 1].begin)) &&
                              !body.empty();
    if (numpy_header) {
      mode = is_param_section(body) ? Mode::Numpy : Mode::None;
      section_indent = ind;
      ++k;
      continue;
    }
    if (!body.empty() && body.back() == ':' && is_param_section(trim(body.substr(0, body.size() - 1)))) {
      mode = Mode::Google;
      section_indent = ind;
      entry_indent = std::string_view::npos;
      continue;
    }
    if (body.empty()) continue;
    if (mode == Mode::Google) {
      if (ind <= section_indent) {
        mode = Mode::None;
        continue;
      }
      if (entry_indent == std::string_view::npos) entry_indent = ind;
      if (ind != entry_indent) continue;
      const auto [b, e] = google_hint(line);
      if (b != std::string_view::npos) {
        edits.push_back({"", lines[k].begin + b, lines[k].begin + e, "", EditReason::DocstringTypeHint});
      }
    } else if (mode == Mode::Numpy) {
      if (ind < section_indent) {
        mode = Mode::None;
        continue;
      }
      if (ind != section_indent) continue;
      const auto [b, e] = numpy_hint(line);
      if (b != std::string_view::npos) {
        edits.push_back({"", lines[k].begin + b, lines[k].begin + e, "", EditReason::DocstringTypeHint});
      }
    }
  }
}

class Stripper {
 public:
  explicit Stripper(const py::Module& m) : m_(m), src_(m.source()) {}

  std::vector<StripEdit> run() {
    visit_block(m_.body(), false);
    std::sort(edits_.begin(), edits_.end(), [](const StripEdit& a, const StripEdit& b) { return a.start < b.start; });
    return std::move(edits_);
  }

 private:
  std::size_t tb(std::size_t t) const { return m_.tokens()[t].begin; }
  std::size_t te(std::size_t t) const { return m_.tokens()[t].end; }

  void add(std::size_t b, std::size_t e, EditReason r, std::string repl = {}) {
    edits_.push_back({"", b, e, std::move(repl), r});
  }

  void visit_block(const std::vector<py::Statement>& body, bool needs_statement) {
    if (!body.empty()) {
      if (const auto doc = m_.docstring_token(body.front())) docstring_hints(src_, tb(*doc), te(*doc), edits_);
    }
    std::vector<const py::Statement*> bare;
    for (const auto& s : body) {
      if (const auto a = m_.annotated_assignment(s); a && !a->equals) bare.push_back(&s);
    }
    const bool emptied = needs_statement && !body.empty() && bare.size() == body.size();
    for (const auto& s : body) {
      switch (s.kind) {
        case py::Statement::Kind::Compound:
          visit_compound(s);
          break;
        case py::Statement::Kind::Simple:
          visit_simple(s, emptied && &s == bare.front());
          break;
        case py::Statement::Kind::Decorator:
          break;
      }
    }
  }

  void visit_compound(const py::Statement& s) {
    if (const auto h = m_.function_header(s)) {
      for (const auto& p : h->params) {
        if (p.colon) add(te(p.name), te(p.ann_last - 1), EditReason::ParamAnnotation);
      }
      if (h->arrow) add(te(h->rparen), te(h->ret_last - 1), EditReason::ReturnAnnotation);
    }
    visit_block(s.body, true);
  }

  void visit_simple(const py::Statement& s, bool becomes_pass) {
    const auto a = m_.annotated_assignment(s);
    if (!a) return;
    if (a->equals) {
      add(te(a->target_last - 1), te(a->ann_last - 1), EditReason::VariableAnnotation);
      return;
    }
    const std::size_t stmt_begin = tb(s.first);
    const std::size_t stmt_end = te(s.last - 1);
    if (becomes_pass) {
      add(stmt_begin, stmt_end, EditReason::VariableAnnotation, "pass");
    } else if (s.owns_line) {
      const std::size_t nl = tb(s.newline);
      add(m_.lines().line_start(stmt_begin), nl >= src_.size() ? src_.size() : m_.lines().line_end(nl),
          EditReason::VariableAnnotation);
    } else if (s.prev_semicolon) {
      add(tb(*s.prev_semicolon), stmt_end, EditReason::VariableAnnotation);
    } else if (s.next_semicolon) {
      std::size_t e = te(*s.next_semicolon);
      while (e < src_.size() && (src_[e] == ' ' || src_[e] == '\t')) ++e;
      add(stmt_begin, e, EditReason::VariableAnnotation);
    } else {
      add(stmt_begin, stmt_end, EditReason::VariableAnnotation, "pass");
    }
  }

  const py::Module& m_;
  std::string_view src_;
  std::vector<StripEdit> edits_;
};

}  // namespace detail

/// Throws SyntaxError when the source does not parse.
inline StrippedFile strip_file(std::string source) {
  const py::Module module(source);
  StrippedFile out;
  out.edits = detail::Stripper(module).run();
  out.result = apply_edits(source, out.edits);
  out.original = std::move(source);
  return out;
}

struct StripFailure {
  std::string path;
  std::string error;
};

struct StripSummary {
  std::size_t files = 0;  ///< Python sources stripped successfully
  std::size_t edits = 0;
  std::map<std::string, std::size_t> edits_by_reason;
  std::vector<StripFailure> failures;
};

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + p.string());
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& p, std::string_view text) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + p.string());
}

/// Sorted regular files under root, as `/`-separated relative paths.
inline std::vector<std::string> list_files(const std::filesystem::path& root) {
  std::vector<std::string> out;
  for (auto it = std::filesystem::recursive_directory_iterator(root); it != std::filesystem::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file()) out.push_back(std::filesystem::relative(it->path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Mirrors src into dst with annotations removed from every `.py` file.
/// Stub files (`.pyi`) are not copied since they carry the ground truth.
inline StripSummary strip_repo(const std::filesystem::path& src, const std::filesystem::path& dst,
                               unsigned jobs = default_jobs()) {
  if (!std::filesystem::is_directory(src)) throw IoError("not a directory: " + src.string());
  std::filesystem::create_directories(dst);
  const auto files = list_files(src);
  StripSummary summary;
  std::mutex mu;
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    const std::string& rel = files[i];
    const auto ext = std::filesystem::path(rel).extension();
    if (ext == ".pyi") return;
    try {
      if (ext != ".py") {
        std::filesystem::create_directories((dst / rel).parent_path());
        std::filesystem::copy_file(src / rel, dst / rel, std::filesystem::copy_options::overwrite_existing);
        return;
      }
      std::string text = read_text_file(src / rel);
      try {
        StrippedFile s = strip_file(text);
        write_text_file(dst / rel, s.result);
        std::lock_guard lock(mu);
        ++summary.files;
        summary.edits += s.edits.size();
        for (const auto& e : s.edits) ++summary.edits_by_reason[std::string(to_string(e.reason))];
      } catch (const SyntaxError& e) {
        write_text_file(dst / rel, text);
        std::lock_guard lock(mu);
        summary.failures.push_back({rel, e.what()});
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      summary.failures.push_back({rel, e.what()});
    }
  });
  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const StripFailure& a, const StripFailure& b) { return a.path < b.path; });
  return summary;
}

}  // namespace typeqal
