// Copyright 2026 cellkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cellkit/bt/model.hpp"

#include <algorithm>
#include <cctype>

namespace cellkit::bt {

std::string_view kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Sequence: return "Sequence";
    case NodeKind::ReactiveSequence: return "ReactiveSequence";
    case NodeKind::Fallback: return "Fallback";
    case NodeKind::Parallel: return "Parallel";
    case NodeKind::Timeout: return "Timeout";
    case NodeKind::Retry: return "Retry";
    case NodeKind::Action: return "Action";
    case NodeKind::Condition: return "Condition";
  }
  return "?";
}

namespace {

// Minimal strict XML subset: elements, attributes, comments, an optional
// prolog, and whitespace-only text. That is the entire tree file grammar,
// and owning the parser keeps rejection of unknown constructs exact.

struct RawElement {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<RawElement> children;
  int line = 0;
  int col = 0;
};

class XmlScanner {
 public:
  explicit XmlScanner(const std::string& text) : text_(text) {}

  RawElement parse_document() {
    skip_prolog_and_misc();
    if (eof()) fail("document has no root element");
    RawElement root = parse_element();
    skip_misc();
    if (!eof()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col_);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const {
    return text_.compare(pos_, s.size(), s) == 0;
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void advance_n(size_t n) {
    for (size_t i = 0; i < n && !eof(); ++i) advance();
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) {
      advance();
    }
  }

  void skip_comment() {
    advance_n(4);  // "<!--"
    while (!eof() && !starts_with("-->")) advance();
    if (eof()) fail("unterminated comment");
    advance_n(3);
  }

  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts_with("<!--")) {
        skip_comment();
      } else {
        return;
      }
    }
  }

  void skip_prolog_and_misc() {
    // Byte-order mark, then an optional <?xml ...?> declaration.
    if (starts_with("\xEF\xBB\xBF")) advance_n(3);
    skip_misc();
    if (starts_with("<?")) {
      while (!eof() && !starts_with("?>")) advance();
      if (eof()) fail("unterminated XML declaration");
      advance_n(2);
    }
    skip_misc();
  }

  std::string parse_name() {
    if (eof() || !(std::isalpha(static_cast<unsigned char>(peek())) ||
                   peek() == '_')) {
      fail("expected a name");
    }
    std::string out;
    while (!eof()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '-' || c == '.' || c == ':') {
        out.push_back(advance());
      } else {
        break;
      }
    }
    return out;
  }

  std::string parse_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) {
      fail("expected quoted attribute value");
    }
    const char quote = advance();
    std::string out;
    while (!eof() && peek() != quote) {
      char c = advance();
      if (c == '<') fail("'<' not allowed in attribute value");
      if (c == '&') {
        out += parse_entity();
      } else {
        out.push_back(c);
      }
    }
    if (eof()) fail("unterminated attribute value");
    advance();  // closing quote
    return out;
  }

  std::string parse_entity() {
    // '&' already consumed.
    std::string ref;
    while (!eof() && peek() != ';' && ref.size() < 8) ref.push_back(advance());
    if (eof() || peek() != ';') fail("malformed entity reference");
    advance();
    if (ref == "amp") return "&";
    if (ref == "lt") return "<";
    if (ref == "gt") return ">";
    if (ref == "quot") return "\"";
    if (ref == "apos") return "'";
    fail("unknown entity reference '&" + ref + ";'");
  }

  RawElement parse_element() {
    if (eof() || peek() != '<') fail("expected '<'");
    RawElement el;
    el.line = line_;
    el.col = col_;
    advance();  // '<'
    el.tag = parse_name();
    while (true) {
      skip_ws();
      if (eof()) fail("unterminated element <" + el.tag + ">");
      if (peek() == '/') {
        advance();
        if (eof() || peek() != '>') fail("malformed self-closing tag");
        advance();
        return el;
      }
      if (peek() == '>') {
        advance();
        parse_children(el);
        return el;
      }
      const int aline = line_;
      const int acol = col_;
      std::string name = parse_name();
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      advance();
      skip_ws();
      std::string value = parse_attr_value();
      for (const auto& [k, v] : el.attrs) {
        if (k == name) {
          throw ParseError("duplicate attribute '" + name + "'", aline, acol);
        }
      }
      el.attrs.emplace_back(std::move(name), std::move(value));
    }
  }

  void parse_children(RawElement& el) {
    while (true) {
      const int tline = line_;
      const int tcol = col_;
      if (eof()) fail("unterminated element <" + el.tag + ">");
      char c = peek();
      if (c == '<') {
        if (starts_with("<!--")) {
          skip_comment();
          continue;
        }
        if (starts_with("</")) {
          advance_n(2);
          std::string close = parse_name();
          if (close != el.tag) {
            throw ParseError("mismatched closing tag </" + close +
                                 "> for <" + el.tag + ">",
                             tline, tcol);
          }
          skip_ws();
          if (eof() || peek() != '>') fail("malformed closing tag");
          advance();
          return;
        }
        el.children.push_back(parse_element());
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        fail("unexpected text content inside <" + el.tag + ">");
      }
    }
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

int64_t parse_int_attr(const RawElement& el, const std::string& name,
                       const std::string& value) {
  size_t used = 0;
  int64_t out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw ParseError("attribute " + name + "=\"" + value + "\" on <" +
                         el.tag + "> is not an integer",
                     el.line, el.col);
  }
  return out;
}

void require_attrs(const RawElement& el,
                   const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : el.attrs) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ParseError("unknown attribute '" + k + "' on <" + el.tag + ">",
                       el.line, el.col);
    }
  }
}

const std::string* find_attr(const RawElement& el, const std::string& name) {
  for (const auto& [k, v] : el.attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

NodeSpec build_node(const RawElement& el);

void build_children(const RawElement& el, NodeSpec& spec) {
  for (const RawElement& c : el.children) spec.children.push_back(build_node(c));
}

NodeSpec build_node(const RawElement& el) {
  NodeSpec spec;
  spec.line = el.line;
  spec.col = el.col;

  if (el.tag == "Sequence" || el.tag == "ReactiveSequence" ||
      el.tag == "Fallback") {
    spec.kind = el.tag == "Sequence"      ? NodeKind::Sequence
                : el.tag == "Fallback"    ? NodeKind::Fallback
                                          : NodeKind::ReactiveSequence;
    require_attrs(el, {});
    build_children(el, spec);
    if (spec.children.empty()) {
      throw ParseError("<" + el.tag + "> needs at least one child", el.line,
                       el.col);
    }
    return spec;
  }

  if (el.tag == "Parallel") {
    spec.kind = NodeKind::Parallel;
    require_attrs(el, {"k"});
    const std::string* k = find_attr(el, "k");
    if (!k) throw ParseError("<Parallel> requires attribute k", el.line, el.col);
    spec.k = static_cast<int>(parse_int_attr(el, "k", *k));
    build_children(el, spec);
    if (spec.children.empty()) {
      throw ParseError("<Parallel> needs at least one child", el.line, el.col);
    }
    if (spec.k < 1 || spec.k > static_cast<int>(spec.children.size())) {
      throw ParseError("<Parallel> k=" + std::to_string(spec.k) +
                           " out of range for " +
                           std::to_string(spec.children.size()) + " children",
                       el.line, el.col);
    }
    return spec;
  }

  if (el.tag == "Timeout" || el.tag == "Retry") {
    const bool is_timeout = el.tag == "Timeout";
    spec.kind = is_timeout ? NodeKind::Timeout : NodeKind::Retry;
    const std::string attr = is_timeout ? "ms" : "n";
    require_attrs(el, {attr});
    const std::string* v = find_attr(el, attr);
    if (!v) {
      throw ParseError("<" + el.tag + "> requires attribute " + attr, el.line,
                       el.col);
    }
    const int64_t num = parse_int_attr(el, attr, *v);
    if (is_timeout) {
      if (num <= 0) {
        throw ParseError("<Timeout> ms must be positive", el.line, el.col);
      }
      spec.ms = num;
    } else {
      if (num < 0) {
        throw ParseError("<Retry> n must be non-negative", el.line, el.col);
      }
      spec.n = static_cast<int>(num);
    }
    build_children(el, spec);
    if (spec.children.size() != 1) {
      throw ParseError("<" + el.tag + "> needs exactly one child, has " +
                           std::to_string(spec.children.size()),
                       el.line, el.col);
    }
    return spec;
  }

  if (el.tag == "Action" || el.tag == "Condition") {
    spec.kind = el.tag == "Action" ? NodeKind::Action : NodeKind::Condition;
    const std::string* name = find_attr(el, "name");
    if (!name) {
      throw ParseError("<" + el.tag + "> requires attribute name", el.line,
                       el.col);
    }
    if (!valid_identifier(*name)) {
      throw ParseError("<" + el.tag + "> name \"" + *name +
                           "\" is not an identifier",
                       el.line, el.col);
    }
    spec.name = *name;
    for (const auto& [k, v] : el.attrs) {
      if (k != "name") spec.params[k] = v;
    }
    if (!el.children.empty()) {
      throw ParseError("<" + el.tag + "> must not have children", el.line,
                       el.col);
    }
    return spec;
  }

  throw ParseError("unknown element <" + el.tag + ">", el.line, el.col);
}

}  // namespace

TreeDefinition parse_tree(const std::string& xml_text) {
  XmlScanner scanner(xml_text);
  RawElement doc = scanner.parse_document();
  if (doc.tag != "BehaviorTree") {
    throw ParseError("root element must be <BehaviorTree>, got <" + doc.tag +
                         ">",
                     doc.line, doc.col);
  }
  require_attrs(doc, {});
  if (doc.children.size() != 1) {
    throw ParseError("<BehaviorTree> must have exactly one child, has " +
                         std::to_string(doc.children.size()),
                     doc.line, doc.col);
  }
  TreeDefinition def;
  def.root = build_node(doc.children[0]);
  def.xml_text = xml_text;
  return def;
}

}  // namespace cellkit::bt
