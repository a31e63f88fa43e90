#include "lensrag/reader.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "lensrag/errors.hpp"
#include "lensrag/text_util.hpp"

namespace lensrag {

void to_json(nlohmann::json& j, const CleanDoc& v) { j = nlohmann::json{{"url", v.url}, {"title", v.title}, {"body", v.body}}; }

void from_json(const nlohmann::json& j, CleanDoc& v) {
  v.url = j.value("url", std::string{});
  v.title = j.value("title", std::string{});
  v.body = j.value("body", std::string{});
}

namespace {

// Subtrees dropped entirely.
const std::unordered_set<std::string> kSkipTags = {"script", "style",  "nav",    "header", "footer", "form",   "noscript", "template",
                                                   "svg",    "iframe", "aside",  "button", "select", "object", "canvas",   "menu",
                                                   "textarea", "head"};

// Elements whose content is raw text up to the matching close tag.
const std::unordered_set<std::string> kRawText = {"script", "style", "textarea", "title"};

const std::unordered_set<std::string> kBlockTags = {
    "p",       "div",   "br",     "h1",     "h2",     "h3",         "h4",      "h5",     "h6",      "li",       "ul",
    "ol",      "dl",    "dt",     "dd",     "table",  "tr",         "thead",   "tbody",  "tfoot",   "section",  "article",
    "main",    "blockquote", "pre", "hr",   "figure", "figcaption", "address", "caption", "center", "details", "summary",
    "body",    "html"};

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", U'&'},        {"lt", U'<'},         {"gt", U'>'},        {"quot", U'"'},       {"apos", U'\''},
      {"nbsp", U' '},       {"copy", 0xA9},       {"reg", 0xAE},       {"trade", 0x2122},    {"mdash", 0x2014},
      {"ndash", 0x2013},    {"hellip", 0x2026},   {"lsquo", 0x2018},   {"rsquo", 0x2019},    {"ldquo", 0x201C},
      {"rdquo", 0x201D},    {"laquo", 0xAB},      {"raquo", 0xBB},     {"middot", 0xB7},     {"bull", 0x2022},
      {"deg", 0xB0},        {"times", 0xD7},      {"divide", 0xF7},    {"euro", 0x20AC},     {"pound", 0xA3},
      {"yen", 0xA5},        {"cent", 0xA2},       {"sect", 0xA7},      {"para", 0xB6},       {"iexcl", 0xA1},
      {"iquest", 0xBF},     {"eacute", 0xE9},     {"egrave", 0xE8},    {"ecirc", 0xEA},      {"aacute", 0xE1},
      {"agrave", 0xE0},     {"acirc", 0xE2},      {"iacute", 0xED},    {"oacute", 0xF3},     {"uacute", 0xFA},
      {"ccedil", 0xE7},     {"ntilde", 0xF1},     {"auml", 0xE4},      {"ouml", 0xF6},       {"uuml", 0xFC},
      {"Auml", 0xC4},       {"Ouml", 0xD6},       {"Uuml", 0xDC},      {"szlig", 0xDF},      {"Eacute", 0xC9},
      {"shy", 0xAD},        {"thinsp", 0x2009},   {"ensp", 0x2002},    {"emsp", 0x2003},     {"zwnj", 0x200C}};
  return table;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) || cp == 0) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      char32_t cp = 0;
      bool ok = name.size() > 1;
      const bool hex = ok && (name[1] == 'x' || name[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; ok && k < name.size(); ++k) {
        const unsigned char c = static_cast<unsigned char>(name[k]);
        int digit = -1;
        if (std::isdigit(c)) digit = c - '0';
        else if (hex && std::isxdigit(c)) digit = std::tolower(c) - 'a' + 10;
        if (digit < 0) ok = false;
        else cp = std::min<char32_t>(cp * (hex ? 16 : 10) + static_cast<char32_t>(digit), 0x110000);
      }
      if (ok && name.size() > (hex ? 2u : 1u)) {
        append_utf8(out, cp);
        i = semi + 1;
        continue;
      }
    } else if (auto it = named_entities().find(name); it != named_entities().end()) {
      append_utf8(out, it->second);
      i = semi + 1;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

// Replace invalid UTF-8 with U+FFFD, drop C0/C1 controls (keeping ASCII
// whitespace, later collapsed), collapse whitespace runs, trim, and defuse
// any '<' that would read as the start of a tag.
std::string clean_paragraph(std::string_view s) {
  std::string valid;
  valid.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((cc & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (cc & 0x3F);
    }
    if (ok) {
      static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < kMin[static_cast<std::size_t>(len)] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
    }
    if (!ok) {
      append_utf8(valid, 0xFFFD);
      ++i;
      continue;
    }
    const bool ascii_space = cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v';
    if (ascii_space) {
      valid.push_back(' ');
    } else if (cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F)) {
      // dropped
    } else {
      valid.append(s.substr(i, static_cast<std::size_t>(len)));
    }
    i += static_cast<std::size_t>(len);
  }

  std::string out;
  out.reserve(valid.size());
  for (std::size_t k = 0; k < valid.size(); ++k) {
    const char c = valid[k];
    if (c == ' ') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
      continue;
    }
    out.push_back(c);
    if (c == '<' && k + 1 < valid.size()) {
      const unsigned char n = static_cast<unsigned char>(valid[k + 1]);
      if (std::isalpha(n) || n == '!' || n == '/' || n == '?') out.push_back(' ');
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

bool looks_like_html(std::string_view raw) {
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    if (raw[i] != '<') continue;
    const unsigned char n = static_cast<unsigned char>(raw[i + 1]);
    if (std::isalpha(n) || n == '!' || n == '/' || n == '?') return true;
  }
  return false;
}

std::string join_paragraphs(const std::vector<std::string>& paras) {
  std::string body;
  for (const auto& p : paras) {
    if (p.empty()) continue;
    if (!body.empty()) body += "\n\n";
    body += p;
  }
  return body;
}

CleanDoc parse_plain(std::string_view raw, std::string_view url) {
  std::vector<std::string> paras;
  std::string cur;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    const std::string_view line = raw.substr(pos, nl - pos);
    if (trim(line).empty()) {
      paras.push_back(clean_paragraph(cur));
      cur.clear();
    } else {
      if (!cur.empty()) cur.push_back(' ');
      cur.append(line);
    }
    pos = nl + 1;
  }
  paras.push_back(clean_paragraph(cur));
  return CleanDoc{std::string(url), "", join_paragraphs(paras)};
}

std::string lower_name(std::string_view raw, std::size_t& i) {
  std::string name;
  while (i < raw.size()) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (std::isalnum(c) || c == '-' || c == ':' || c == '_') {
      name.push_back(static_cast<char>(std::tolower(c)));
      ++i;
    } else {
      break;
    }
  }
  return name;
}

// Advance past the end of a tag ('>'), honouring quoted attribute values.
// Returns true when the tag was self-closing.
bool skip_tag_rest(std::string_view raw, std::size_t& i) {
  char quote = 0;
  bool self_closing = false;
  while (i < raw.size()) {
    const char c = raw[i++];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return self_closing;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      self_closing = c == '/';
    }
  }
  return self_closing;
}

std::size_t find_close_tag(std::string_view raw, std::size_t from, std::string_view name) {
  std::size_t p = from;
  while ((p = raw.find("</", p)) != std::string_view::npos) {
    std::size_t k = p + 2;
    if (lower_name(raw, k) == name) return p;
    p += 2;
  }
  return raw.size();
}

class HtmlWalker {
 public:
  explicit HtmlWalker(std::string_view raw) : raw_(raw) {}

  void run() {
    std::size_t i = 0;
    while (i < raw_.size()) {
      if (raw_[i] != '<') {
        const std::size_t next = raw_.find('<', i);
        const std::size_t end = next == std::string_view::npos ? raw_.size() : next;
        text(raw_.substr(i, end - i));
        i = end;
        continue;
      }
      if (raw_.compare(i, 4, "<!--") == 0) {
        const std::size_t end = raw_.find("-->", i + 4);
        i = end == std::string_view::npos ? raw_.size() : end + 3;
        continue;
      }
      const unsigned char n = i + 1 < raw_.size() ? static_cast<unsigned char>(raw_[i + 1]) : 0;
      if (n == '!' || n == '?') {
        const std::size_t end = raw_.find('>', i);
        i = end == std::string_view::npos ? raw_.size() : end + 1;
        continue;
      }
      if (n == '/') {
        std::size_t k = i + 2;
        const std::string name = lower_name(raw_, k);
        skip_tag_rest(raw_, k);
        if (!name.empty()) close_tag(name);
        i = k;
        continue;
      }
      if (!std::isalpha(n)) {
        text(raw_.substr(i, 1));
        ++i;
        continue;
      }
      std::size_t k = i + 1;
      const std::string name = lower_name(raw_, k);
      const bool self_closing = skip_tag_rest(raw_, k);
      i = k;
      if (kRawText.contains(name) && !self_closing) {
        const std::size_t close = find_close_tag(raw_, i, name);
        if (name == "title" && title_.empty()) title_ = clean_paragraph(decode_entities(raw_.substr(i, close - i)));
        i = close;
        continue;
      }
      open_tag(name, self_closing);
    }
    flush();
  }

  CleanDoc result(std::string_view url) {
    std::string title = title_.empty() ? first_h1_ : title_;
    return CleanDoc{std::string(url), std::move(title), join_paragraphs(paragraphs_)};
  }

 private:
  void text(std::string_view t) {
    if (skip_depth_ > 0) return;
    const std::string decoded = decode_entities(t);
    cur_ += decoded;
    if (in_h1_ && first_h1_done_ == false) h1_buf_ += decoded;
  }

  void open_tag(const std::string& name, bool self_closing) {
    if (skip_depth_ > 0 && skip_name_ == "head" && name == "body") {
      skip_depth_ = 0;  // </head> may be omitted
      skip_name_.clear();
    }
    if (skip_depth_ > 0) {
      if (name == skip_name_ && !self_closing) ++skip_depth_;
      return;
    }
    if (kSkipTags.contains(name) && !self_closing) {
      flush();
      skip_name_ = name;
      skip_depth_ = 1;
      return;
    }
    if (kBlockTags.contains(name)) flush();
    else if (name == "td" || name == "th" || name == "img") cur_.push_back(' ');
    if (name == "h1" && !first_h1_done_) in_h1_ = true;
  }

  void close_tag(const std::string& name) {
    if (skip_depth_ > 0) {
      if (name == skip_name_ && --skip_depth_ == 0) skip_name_.clear();
      return;
    }
    if (kBlockTags.contains(name)) flush();
    else if (name == "td" || name == "th") cur_.push_back(' ');
    if (name == "h1" && in_h1_) {
      in_h1_ = false;
      first_h1_done_ = true;
      first_h1_ = clean_paragraph(h1_buf_);
    }
  }

  void flush() {
    paragraphs_.push_back(clean_paragraph(cur_));
    cur_.clear();
  }

  std::string_view raw_;
  std::vector<std::string> paragraphs_;
  std::string cur_;
  std::string title_;
  std::string first_h1_;
  std::string h1_buf_;
  bool in_h1_ = false;
  bool first_h1_done_ = false;
  std::string skip_name_;
  int skip_depth_ = 0;
};

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

CleanDoc parse_html(std::string_view raw, std::string_view url) {
  if (!looks_like_html(raw)) return parse_plain(raw, url);
  HtmlWalker walker(raw);
  walker.run();
  return walker.result(url);
}

std::vector<TextChunk> chunk_spans(std::string_view body, int size_i, int overlap_i) {
  if (size_i < 1 || overlap_i < 0 || overlap_i >= size_i) throw InvalidParams("chunking requires size > overlap >= 0");
  const std::size_t size = static_cast<std::size_t>(size_i);
  const std::size_t overlap = static_cast<std::size_t>(overlap_i);
  const std::size_t n = body.size();
  std::vector<TextChunk> out;
  std::size_t start = 0;
  while (start < n) {
    if (n - start <= size) {
      out.push_back({std::string(body.substr(start)), start});
      break;
    }
    const std::size_t lo = start + size - overlap;
    const std::size_t hi = start + size;
    std::size_t cut = 0;
    for (std::size_t e = hi; e >= lo && e >= 2; --e) {
      if (body[e - 1] == '\n' && body[e - 2] == '\n') {
        cut = e;
        break;
      }
    }
    if (cut == 0) {
      for (std::size_t e = hi; e >= lo && e >= 2; --e) {
        const char prev = body[e - 2];
        if ((prev == '.' || prev == '!' || prev == '?') && std::isspace(static_cast<unsigned char>(body[e - 1]))) {
          cut = e;
          break;
        }
      }
    }
    if (cut == 0) {
      cut = hi;
      while (cut > start + 1 && is_continuation(static_cast<unsigned char>(body[cut]))) --cut;
    }
    out.push_back({std::string(body.substr(start, cut - start)), start});
    std::size_t next = cut > overlap ? cut - overlap : 0;
    if (next <= start) next = start + 1;
    while (next < cut && is_continuation(static_cast<unsigned char>(body[next]))) ++next;
    start = next;
  }
  return out;
}

std::vector<std::string> chunk(const CleanDoc& doc, int size, int overlap) {
  std::vector<std::string> out;
  for (auto& c : chunk_spans(doc.body, size, overlap)) out.push_back(std::move(c.text));
  return out;
}

}  // namespace lensrag
