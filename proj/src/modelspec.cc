// lmkit/modelspec.cc

// Copyright 2026  The lmkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lmkit/modelspec.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "lmkit/common.h"

namespace lmkit {

const std::string& ModelSpecNode::Attr(const std::string& key,
                                       const std::string& fallback) const {
  auto it = attrs.find(key);
  return it == attrs.end() ? fallback : it->second;
}

const std::string& ModelSpecNode::RequiredAttr(const std::string& key) const {
  auto it = attrs.find(key);
  if (it == attrs.end()) {
    throw DataError("model spec: node '" + kind + "' missing attribute '" +
                    key + "'");
  }
  return it->second;
}

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;

  void SkipSpace() {
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else if (text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void Fail(const std::string& what) {
    throw DataError("model spec: " + what + " at offset " +
                    std::to_string(pos));
  }

  std::string Word() {
    SkipSpace();
    if (pos < text.size() && text[pos] == '"') {
      ++pos;
      std::string out;
      while (pos < text.size() && text[pos] != '"') out.push_back(text[pos++]);
      if (pos == text.size()) Fail("unterminated string");
      ++pos;
      return out;
    }
    size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')' && text[pos] != '=') {
      ++pos;
    }
    if (pos == start) Fail("expected token");
    return text.substr(start, pos - start);
  }

  ModelSpecNode Node() {
    SkipSpace();
    if (pos >= text.size() || text[pos] != '(') Fail("expected '('");
    ++pos;
    ModelSpecNode node;
    node.kind = Word();
    for (;;) {
      SkipSpace();
      if (pos >= text.size()) Fail("unterminated node");
      if (text[pos] == ')') {
        ++pos;
        return node;
      }
      if (text[pos] == '(') {
        node.children.push_back(Node());
        continue;
      }
      std::string key = Word();
      SkipSpace();
      if (pos >= text.size() || text[pos] != '=') Fail("expected '='");
      ++pos;
      node.attrs[key] = Word();
    }
  }
};

bool NeedsQuotes(const std::string& v) {
  if (v.empty()) return true;
  for (char c : v) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
        c == '=' || c == '"') {
      return true;
    }
  }
  return false;
}

void Format(const ModelSpecNode& node, std::ostringstream& out, int indent) {
  out << std::string(indent, ' ') << '(' << node.kind;
  for (const auto& [k, v] : node.attrs) {
    out << ' ' << k << '=';
    if (NeedsQuotes(v)) {
      out << '"' << v << '"';
    } else {
      out << v;
    }
  }
  for (const ModelSpecNode& child : node.children) {
    out << '\n';
    Format(child, out, indent + 2);
  }
  out << ')';
}

}  // namespace

ModelSpecNode ParseModelSpec(const std::string& text) {
  Parser p{text};
  ModelSpecNode node = p.Node();
  p.SkipSpace();
  if (p.pos != text.size()) p.Fail("trailing text");
  return node;
}

ModelSpecNode ReadModelSpecFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model spec: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseModelSpec(ss.str());
}

std::string FormatModelSpec(const ModelSpecNode& node) {
  std::ostringstream out;
  Format(node, out, 0);
  out << '\n';
  return out.str();
}

}  // namespace lmkit
