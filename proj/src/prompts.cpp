#include "lensrag/prompts.hpp"

#include <cctype>
#include <filesystem>

#include "lensrag/errors.hpp"
#include "lensrag/prompt_data.hpp"
#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of a `{identifier}` token at `pos`, or 0.
std::size_t placeholder_len(std::string_view s, std::size_t pos) {
  if (s[pos] != '{' || pos + 1 >= s.size() || !ident_start(s[pos + 1])) return 0;
  std::size_t i = pos + 2;
  while (i < s.size() && ident_char(s[i])) ++i;
  if (i >= s.size() || s[i] != '}') return 0;
  return i + 1 - pos;
}

}  // namespace

std::string render(std::string_view tmpl, const PromptVars& vars) {
  std::string out;
  std::size_t line_start = 0;
  while (line_start <= tmpl.size()) {
    std::size_t line_end = tmpl.find('\n', line_start);
    const bool last = line_end == std::string_view::npos;
    if (last) line_end = tmpl.size();
    const std::string_view line = tmpl.substr(line_start, line_end - line_start);

    std::string rendered;
    bool only_placeholder = !line.empty() && placeholder_len(line, 0) == line.size();
    for (std::size_t i = 0; i < line.size();) {
      if (const std::size_t n = placeholder_len(line, i)) {
        const std::string name(line.substr(i + 1, n - 2));
        auto it = vars.find(name);
        if (it == vars.end()) throw InvalidParams("prompt placeholder {" + name + "} has no value");
        rendered += it->second;
        i += n;
      } else {
        rendered.push_back(line[i++]);
      }
    }
    if (!(only_placeholder && rendered.empty())) {
      out += rendered;
      if (!last) out.push_back('\n');
    } else if (last && !out.empty() && out.back() == '\n') {
      out.pop_back();
    }
    if (last) break;
    line_start = line_end + 1;
  }
  return out;
}

const PromptSet& PromptSet::builtin() {
  static const PromptSet set = [] {
    PromptSet s;
    for (const auto& [name, text] : detail::kBuiltinPrompts) s.templates_.emplace(name, text);
    return s;
  }();
  return set;
}

PromptSet PromptSet::with_overrides(const std::string& dir) {
  PromptSet s = builtin();
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InvalidParams("prompt directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::string text = read_file(entry.path().string());
    if (!text.empty() && text.back() == '\n') text.pop_back();
    s.templates_[entry.path().stem().string()] = std::move(text);
  }
  return s;
}

const std::string& PromptSet::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw InvalidParams("unknown prompt template: " + std::string(name));
  return it->second;
}

std::string PromptSet::render(std::string_view name, const PromptVars& vars) const {
  return lensrag::render(get(name), vars);
}

std::vector<std::string> PromptSet::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : templates_) out.push_back(k);
  return out;
}

}  // namespace lensrag
