#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lensrag {

using PromptVars = std::map<std::string, std::string>;

/// Substitutes `{identifier}` placeholders. Braces that do not enclose an
/// identifier (JSON examples, for instance) are kept verbatim. A line made up
/// of a single placeholder that expands to the empty string is dropped.
/// Throws InvalidParams for an identifier missing from `vars`.
std::string render(std::string_view tmpl, const PromptVars& vars);

/// Named prompt templates. The built-in set is compiled from prompts/*.txt.
class PromptSet {
 public:
  static const PromptSet& builtin();

  /// Built-in templates overridden by any `<name>.txt` found in `dir`.
  static PromptSet with_overrides(const std::string& dir);

  const std::string& get(std::string_view name) const;
  std::string render(std::string_view name, const PromptVars& vars) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace lensrag
