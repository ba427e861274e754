#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cstts/error.hpp"
#include "cstts/plan.hpp"
#include "cstts/unicode.hpp"

namespace cstts {

enum class DialectName { generic, google, polly, azure };

inline std::string_view to_string(DialectName d) {
  switch (d) {
    case DialectName::generic: return "generic";
    case DialectName::google: return "google";
    case DialectName::polly: return "polly";
    case DialectName::azure: return "azure";
  }
  return "generic";
}

inline DialectName dialect_name_from_string(std::string_view s) {
  if (s == "generic") return DialectName::generic;
  if (s == "google") return DialectName::google;
  if (s == "polly") return DialectName::polly;
  if (s == "azure") return DialectName::azure;
  throw Error(ErrorCode::invalid_argument, "unknown SSML dialect: " + std::string(s));
}

struct SsmlDialect {
  DialectName name = DialectName::generic;
  std::size_t max_bytes = 5000;
  bool supports_voice_tag = true;
  bool supports_lang_tag = true;
  bool supports_emphasis = true;
  bool pitch_in_semitones = false;
  bool break_inside_voice = false;  // engines that reject bare children of <speak>
  std::string break_tag_form = R"(<break time="{ms}ms"/>)";
  std::string root_attributes;

  static SsmlDialect builtin(DialectName name) {
    SsmlDialect d;
    d.name = name;
    switch (name) {
      case DialectName::generic:
        break;
      case DialectName::google:
        d.pitch_in_semitones = true;
        break;
      case DialectName::polly:
        d.max_bytes = 6000;
        d.supports_voice_tag = false;
        break;
      case DialectName::azure:
        d.max_bytes = 65536;
        d.break_inside_voice = true;
        d.root_attributes = R"( version="1.0" xmlns="http://www.w3.org/2001/10/synthesis")";
        break;
    }
    return d;
  }

  static SsmlDialect builtin(std::string_view name) { return builtin(dialect_name_from_string(name)); }

  void validate() const {
    if (max_bytes == 0) throw Error(ErrorCode::config_error, "dialect max_bytes must be positive");
    if (!supports_voice_tag && !supports_lang_tag) {
      throw Error(ErrorCode::config_error, "dialect needs voice or lang tag support");
    }
    if (break_tag_form.find("{ms}") == std::string::npos) {
      throw Error(ErrorCode::config_error, "break_tag_form must contain {ms}");
    }
  }

  /// Fields absent from `j` come from the named builtin.
  static SsmlDialect from_json(const nlohmann::json& j) {
    try {
      SsmlDialect d = builtin(j.at("name").get<std::string>());
      d.max_bytes = j.value("max_bytes", d.max_bytes);
      d.supports_voice_tag = j.value("supports_voice_tag", d.supports_voice_tag);
      d.supports_lang_tag = j.value("supports_lang_tag", d.supports_lang_tag);
      d.supports_emphasis = j.value("supports_emphasis", d.supports_emphasis);
      d.pitch_in_semitones = j.value("pitch_in_semitones", d.pitch_in_semitones);
      d.break_inside_voice = j.value("break_inside_voice", d.break_inside_voice);
      d.break_tag_form = j.value("break_tag_form", d.break_tag_form);
      d.root_attributes = j.value("root_attributes", d.root_attributes);
      d.validate();
      return d;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, std::string("bad dialect: ") + e.what());
    }
  }

  nlohmann::json to_json() const {
    return {{"name", std::string(to_string(name))},
            {"max_bytes", max_bytes},
            {"supports_voice_tag", supports_voice_tag},
            {"supports_lang_tag", supports_lang_tag},
            {"supports_emphasis", supports_emphasis},
            {"pitch_in_semitones", pitch_in_semitones},
            {"break_inside_voice", break_inside_voice},
            {"break_tag_form", break_tag_form},
            {"root_attributes", root_attributes}};
  }

  friend bool operator==(const SsmlDialect&, const SsmlDialect&) = default;
};

struct SsmlDocument {
  SsmlDialect dialect;
  std::string body;
  std::size_t byte_len = 0;
};

inline std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline std::string signed_pct(int v) { return (v >= 0 ? "+" : "") + std::to_string(v) + "%"; }

inline std::string semitones(int pitch_pct) {
  const double st = 12.0 * std::log2(1.0 + pitch_pct / 100.0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2fst", st);
  return buf;
}

inline std::string render_break(const SsmlDialect& d, int ms) {
  std::string out = d.break_tag_form;
  out.replace(out.find("{ms}"), 4, std::to_string(ms));
  return out;
}

inline std::string render_content(const VoicePlanEntry& e, const SsmlDialect& d, bool wrap_lang) {
  std::string inner = escape_text(e.segment.text);
  if (d.supports_emphasis && e.prosody.emphasis != Emphasis::none) {
    inner = "<emphasis level=\"" + std::string(to_string(e.prosody.emphasis)) + "\">" + inner + "</emphasis>";
  }
  if (e.prosody.rate_pct != 0 || e.prosody.pitch_pct != 0) {
    const std::string pitch = d.pitch_in_semitones ? semitones(e.prosody.pitch_pct) : signed_pct(e.prosody.pitch_pct);
    inner = "<prosody rate=\"" + signed_pct(e.prosody.rate_pct) + "\" pitch=\"" + pitch + "\">" + inner + "</prosody>";
  }
  if (wrap_lang) inner = "<lang xml:lang=\"" + escape_text(e.locale.str()) + "\">" + inner + "</lang>";
  return inner;
}

}  // namespace detail

/// Renders the plan as one <speak> document. Consecutive entries sharing a
/// voice share one <voice> span; foreign text under another language's voice
/// goes in a <lang> span; pauses become break tags.
inline SsmlDocument build_ssml(const VoicePlan& plan, const SsmlDialect& dialect) {
  if (plan.entries.empty()) throw Error(ErrorCode::invalid_argument, "cannot render an empty plan");
  dialect.validate();
  std::string body = "<speak" + dialect.root_attributes + " xml:lang=\"" + escape_text(plan.anchor_locale.str()) + "\">";
  const auto& entries = plan.entries;
  if (dialect.supports_voice_tag) {
    std::size_t i = 0;
    while (i < entries.size()) {
      std::size_t j = i;
      while (j < entries.size() && entries[j].voice.id == entries[i].voice.id) ++j;
      const bool lead_break = entries[i].pause_before_ms > 0;
      if (lead_break && !dialect.break_inside_voice) body += detail::render_break(dialect, entries[i].pause_before_ms);
      body += "<voice name=\"" + escape_text(entries[i].voice.id) + "\">";
      if (lead_break && dialect.break_inside_voice) body += detail::render_break(dialect, entries[i].pause_before_ms);
      for (std::size_t k = i; k < j; ++k) {
        if (k > i && entries[k].pause_before_ms > 0) body += detail::render_break(dialect, entries[k].pause_before_ms);
        body += detail::render_content(entries[k], dialect, entries[k].lang_span && dialect.supports_lang_tag);
      }
      body += "</voice>";
      i = j;
    }
  } else {
    for (const auto& e : entries) {
      if (e.pause_before_ms > 0) body += detail::render_break(dialect, e.pause_before_ms);
      body += detail::render_content(e, dialect, true);
    }
  }
  body += "</speak>";
  if (body.size() > dialect.max_bytes) {
    throw Error(ErrorCode::size_limit_exceeded, "SSML is " + std::to_string(body.size()) + " bytes; " +
                                                    std::string(to_string(dialect.name)) + " allows " +
                                                    std::to_string(dialect.max_bytes));
  }
  const auto len = body.size();
  return {dialect, std::move(body), len};
}

namespace xml {

struct Event {
  enum class Kind { open, close, empty, text };
  Kind kind;
  std::string name;  // element name, or decoded text
  std::vector<std::pair<std::string, std::string>> attributes;

  std::optional<std::string> attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

struct ScanResult {
  std::vector<Event> events;
  std::optional<std::string> error;  // first malformation, if any
};

inline bool decode_entities(std::string_view in, std::string& out) {
  out.clear();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != '&') {
      out += in[i];
      continue;
    }
    const auto semi = in.find(';', i);
    if (semi == std::string_view::npos) return false;
    const auto ent = in.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (ent.size() > 1 && ent[0] == '#') {
      const bool hex = ent[1] == 'x' || ent[1] == 'X';
      const auto digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) return false;
      unsigned long cp = 0;
      for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else return false;
        cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
        if (cp > 0x10FFFF) return false;
      }
      unicode::append_utf8(out, static_cast<char32_t>(cp));
    } else {
      return false;
    }
    i = semi;
  }
  return true;
}

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' || c == '-' || c == '.' ||
         static_cast<unsigned char>(c) >= 0x80;
}

/// Tokenizes markup into open/close/empty/text events. Stops at the first
/// lexical error; nesting is checked by the caller.
inline ScanResult scan(std::string_view body) {
  ScanResult r;
  std::size_t i = 0;
  auto fail = [&](std::string msg) {
    r.error = std::move(msg);
    return r;
  };
  while (i < body.size()) {
    if (body[i] != '<') {
      const auto next = body.find('<', i);
      const auto raw = body.substr(i, next == std::string_view::npos ? std::string_view::npos : next - i);
      if (raw.find('>') != std::string_view::npos) return fail("stray '>' in text");
      std::string text;
      if (!decode_entities(raw, text)) return fail("bad entity in text");
      r.events.push_back({Event::Kind::text, std::move(text), {}});
      i = next == std::string_view::npos ? body.size() : next;
      continue;
    }
    if (body.substr(i, 4) == "<!--") {
      const auto end = body.find("-->", i + 4);
      if (end == std::string_view::npos) return fail("unterminated comment");
      i = end + 3;
      continue;
    }
    if (body.substr(i, 2) == "<?") {
      const auto end = body.find("?>", i + 2);
      if (end == std::string_view::npos) return fail("unterminated processing instruction");
      i = end + 2;
      continue;
    }
    const bool closing = body.substr(i, 2) == "</";
    std::size_t p = i + (closing ? 2 : 1);
    const std::size_t name_begin = p;
    while (p < body.size() && is_name_char(body[p])) ++p;
    if (p == name_begin) return fail("missing element name");
    Event ev{closing ? Event::Kind::close : Event::Kind::open, std::string(body.substr(name_begin, p - name_begin)), {}};
    for (;;) {
      while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
      if (p >= body.size()) return fail("unterminated tag <" + ev.name);
      if (body[p] == '>') {
        ++p;
        break;
      }
      if (!closing && body.substr(p, 2) == "/>") {
        ev.kind = Event::Kind::empty;
        p += 2;
        break;
      }
      if (closing) return fail("junk in closing tag </" + ev.name);
      const std::size_t an = p;
      while (p < body.size() && is_name_char(body[p])) ++p;
      if (p == an) return fail("bad attribute in <" + ev.name);
      std::string key(body.substr(an, p - an));
      while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
      if (p >= body.size() || body[p] != '=') return fail("attribute without value in <" + ev.name);
      ++p;
      while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
      if (p >= body.size() || (body[p] != '"' && body[p] != '\'')) return fail("unquoted attribute in <" + ev.name);
      const char quote = body[p++];
      const auto close = body.find(quote, p);
      if (close == std::string_view::npos) return fail("unterminated attribute in <" + ev.name);
      const auto raw = body.substr(p, close - p);
      if (raw.find('<') != std::string_view::npos) return fail("'<' in attribute value");
      std::string value;
      if (!decode_entities(raw, value)) return fail("bad entity in attribute");
      for (const auto& [k, _] : ev.attributes) {
        if (k == key) return fail("duplicate attribute " + key);
      }
      ev.attributes.emplace_back(std::move(key), std::move(value));
      p = close + 1;
    }
    r.events.push_back(std::move(ev));
    i = p;
  }
  return r;
}

}  // namespace xml

enum class FindingCode {
  malformed_markup,
  unclosed_element,
  mismatched_tag,
  root_not_speak,
  text_outside_span,
  invalid_break,
  size_limit_exceeded,
  byte_length_mismatch,
};

inline std::string_view to_string(FindingCode c) {
  switch (c) {
    case FindingCode::malformed_markup: return "MalformedMarkup";
    case FindingCode::unclosed_element: return "UnclosedElement";
    case FindingCode::mismatched_tag: return "MismatchedTag";
    case FindingCode::root_not_speak: return "RootNotSpeak";
    case FindingCode::text_outside_span: return "TextOutsideSpan";
    case FindingCode::invalid_break: return "InvalidBreak";
    case FindingCode::size_limit_exceeded: return "SizeLimitExceeded";
    case FindingCode::byte_length_mismatch: return "ByteLengthMismatch";
  }
  return "MalformedMarkup";
}

struct Finding {
  FindingCode code;
  std::string detail;
};

/// Parses "50ms" / "0.5s" into milliseconds.
inline std::optional<double> parse_break_time(std::string_view t) {
  double scale = 0;
  if (t.size() > 2 && t.substr(t.size() - 2) == "ms") {
    scale = 1.0;
    t.remove_suffix(2);
  } else if (t.size() > 1 && t.back() == 's') {
    scale = 1000.0;
    t.remove_suffix(1);
  } else {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const std::string s(t);
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v * scale;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::vector<Finding> validate(const SsmlDocument& doc) {
  std::vector<Finding> findings;
  if (doc.byte_len != doc.body.size()) {
    findings.push_back({FindingCode::byte_length_mismatch, "byte_len does not match body"});
  }
  if (doc.body.size() > doc.dialect.max_bytes) {
    findings.push_back({FindingCode::size_limit_exceeded, std::to_string(doc.body.size()) + " > " +
                                                              std::to_string(doc.dialect.max_bytes)});
  }
  const auto scanned = xml::scan(doc.body);
  if (scanned.error) {
    findings.push_back({FindingCode::malformed_markup, *scanned.error});
    return findings;
  }
  std::vector<std::string> stack;
  std::size_t span_depth = 0;  // open voice/lang elements
  bool root_seen = false;
  bool root_closed = false;
  for (const auto& ev : scanned.events) {
    using K = xml::Event::Kind;
    const bool whitespace = ev.kind == K::text && unicode::trim(ev.name).empty();
    if (root_closed && !whitespace) {
      findings.push_back({FindingCode::malformed_markup, "content after root element"});
      return findings;
    }
    switch (ev.kind) {
      case K::text:
        if (!whitespace && (stack.empty() || span_depth == 0)) {
          findings.push_back({FindingCode::text_outside_span, ev.name});
        }
        break;
      case K::open:
      case K::empty:
        if (stack.empty()) {
          if (root_seen || ev.name != "speak") {
            findings.push_back({FindingCode::root_not_speak, ev.name});
            return findings;
          }
          root_seen = true;
        }
        if (ev.name == "break") {
          const auto t = ev.attribute("time");
          const auto ms = t ? parse_break_time(*t) : std::nullopt;
          if (t && (!ms || *ms < 0)) findings.push_back({FindingCode::invalid_break, *t});
        }
        if (ev.kind == K::open) {
          stack.push_back(ev.name);
          if (ev.name == "voice" || ev.name == "lang") ++span_depth;
        } else if (stack.empty()) {
          root_closed = true;
        }
        break;
      case K::close:
        if (stack.empty() || stack.back() != ev.name) {
          findings.push_back({FindingCode::mismatched_tag, "</" + ev.name + ">"});
          return findings;
        }
        if (ev.name == "voice" || ev.name == "lang") --span_depth;
        stack.pop_back();
        if (stack.empty()) root_closed = true;
        break;
    }
  }
  if (!root_seen) findings.push_back({FindingCode::root_not_speak, "no root element"});
  if (!stack.empty()) findings.push_back({FindingCode::unclosed_element, "<" + stack.back() + ">"});
  return findings;
}

/// Text as a listener would hear it: tags removed, entities decoded.
inline std::string spoken_text(std::string_view body) {
  std::string out;
  for (const auto& ev : xml::scan(body).events) {
    if (ev.kind == xml::Event::Kind::text) out += ev.name;
  }
  return out;
}

/// One audible unit of an SSML document: either text under a voice and
/// prosody, or a pause.
struct SpokenPiece {
  std::string text;
  std::string voice_id;
  Prosody prosody;
  int pause_ms = 0;
  bool is_pause() const { return text.empty(); }
};

namespace detail {

inline int parse_pct_attribute(std::string_view v) {
  try {
    if (v.size() > 2 && v.substr(v.size() - 2) == "st") {
      const double st = std::stod(std::string(v.substr(0, v.size() - 2)));
      return static_cast<int>(std::lround((std::exp2(st / 12.0) - 1.0) * 100.0));
    }
    if (!v.empty() && v.back() == '%') return static_cast<int>(std::lround(std::stod(std::string(v.substr(0, v.size() - 1)))));
  } catch (const std::exception&) {
  }
  return 0;
}

}  // namespace detail

/// Flattens an SSML document into spoken pieces; text outside any <voice>
/// belongs to `default_voice`.
inline std::vector<SpokenPiece> interpret_ssml(std::string_view body, const std::string& default_voice) {
  const auto scanned = xml::scan(body);
  if (scanned.error) throw Error(ErrorCode::invalid_argument, "malformed SSML: " + *scanned.error);
  std::vector<SpokenPiece> pieces;
  std::vector<std::string> voices{default_voice};
  std::vector<Prosody> prosodies{Prosody{}};
  std::vector<std::string> open;
  for (const auto& ev : scanned.events) {
    using K = xml::Event::Kind;
    if (ev.kind == K::text) {
      if (!ev.name.empty() && !open.empty()) pieces.push_back({ev.name, voices.back(), prosodies.back(), 0});
    } else if (ev.kind == K::empty || ev.kind == K::open) {
      if (ev.name == "break") {
        const auto ms = parse_break_time(ev.attribute("time").value_or("0ms"));
        pieces.push_back({"", voices.back(), prosodies.back(), static_cast<int>(std::lround(ms.value_or(0)))});
      }
      if (ev.kind == K::open) {
        open.push_back(ev.name);
        if (ev.name == "voice") voices.push_back(ev.attribute("name").value_or(voices.back()));
        if (ev.name == "prosody") {
          Prosody p = prosodies.back();
          if (auto r = ev.attribute("rate")) p.rate_pct = detail::parse_pct_attribute(*r);
          if (auto pt = ev.attribute("pitch")) p.pitch_pct = detail::parse_pct_attribute(*pt);
          prosodies.push_back(p);
        }
      }
    } else {
      if (ev.name == "voice" && voices.size() > 1) voices.pop_back();
      if (ev.name == "prosody" && prosodies.size() > 1) prosodies.pop_back();
      if (!open.empty()) open.pop_back();
    }
  }
  return pieces;
}

}  // namespace cstts
