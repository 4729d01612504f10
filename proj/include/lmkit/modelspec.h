// lmkit/modelspec.h

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

#ifndef LMKIT_MODELSPEC_H_
#define LMKIT_MODELSPEC_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lmkit {

// Declarative model tree, serialized as parenthesized nodes:
//
//   (interpolate name=top
//     (leaf pattern="x y" smoothing=kn mode=interp)
//     (cache kind=unigram))
//
// Node kinds: leaf, interpolate, product, cache, mixture.  Attribute
// values may be double-quoted.  Parameter values are not stored here; they
// live in the parameter file so the optimizer can rewrite them.
struct ModelSpecNode {
  std::string kind;
  std::map<std::string, std::string> attrs;
  std::vector<ModelSpecNode> children;

  const std::string& Attr(const std::string& key,
                          const std::string& fallback) const;
  const std::string& RequiredAttr(const std::string& key) const;
  bool HasAttr(const std::string& key) const { return attrs.count(key) != 0; }
};

ModelSpecNode ParseModelSpec(const std::string& text);
ModelSpecNode ReadModelSpecFile(const std::string& path);
std::string FormatModelSpec(const ModelSpecNode& node);

}  // namespace lmkit

#endif  // LMKIT_MODELSPEC_H_
