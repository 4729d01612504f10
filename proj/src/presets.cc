// lmkit/presets.cc

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

#include "lmkit/presets.h"

#include <algorithm>

#include "lmkit/common.h"
#include "lmkit/patterns.h"

namespace lmkit {

namespace {

// Context letters for an n-gram of the given order: distances
// order-1 .. 1, e.g. order 5 -> "v w x y".
std::string NgramPattern(uint32_t order, bool clusters = false,
                         bool target_cluster_slot = false) {
  std::string out;
  for (uint32_t d = order - 1; d >= 1; --d) {
    char c = static_cast<char>('z' - d);
    if (clusters) c = static_cast<char>(c - 'a' + 'A');
    if (!out.empty()) out.push_back(' ');
    out.push_back(c);
    if (d == 1) break;
  }
  if (target_cluster_slot) {
    if (!out.empty()) out.push_back(' ');
    out.push_back('Z');
  }
  return out;
}

ModelSpecNode Leaf(const std::string& pattern, const std::string& smoothing,
                   const std::string& predict = "word", int type = -1) {
  ModelSpecNode node;
  node.kind = "leaf";
  node.attrs["pattern"] = pattern;
  node.attrs["smoothing"] = smoothing;
  if (predict != "word") node.attrs["predict"] = predict;
  if (type >= 0) node.attrs["type"] = std::to_string(type);
  return node;
}

ModelSpecNode Interpolate(std::vector<ModelSpecNode> children,
                          const std::string& name = "") {
  ModelSpecNode node;
  node.kind = "interpolate";
  if (!name.empty()) node.attrs["name"] = name;
  node.children = std::move(children);
  return node;
}

ModelSpecNode Product(ModelSpecNode cluster, ModelSpecNode word) {
  ModelSpecNode node;
  node.kind = "product";
  node.children.push_back(std::move(cluster));
  node.children.push_back(std::move(word));
  return node;
}

ModelSpecNode Cache(const std::string& kind, const std::string& predict,
                    bool conditioned, const std::string& params = "") {
  ModelSpecNode node;
  node.kind = "cache";
  node.attrs["kind"] = kind;
  if (predict != "word") node.attrs["predict"] = predict;
  if (conditioned) node.attrs["conditioned"] = "true";
  if (!params.empty()) node.attrs["params"] = params;
  return node;
}

}  // namespace

ModelSpecNode NgramSpec(uint32_t order, const std::string& smoothing,
                        const std::string& mode,
                        const std::string& discounts) {
  if (order < 1 || order > 20) throw DataError("ngram: order must be 1..20");
  ModelSpecNode leaf = Leaf(NgramPattern(order), smoothing);
  if (mode != "interp") leaf.attrs["mode"] = mode;
  if (discounts != "single") leaf.attrs["discounts"] = discounts;
  return leaf;
}

ModelSpecNode SkipSpec(const std::string& name, const std::string& smoothing) {
  auto leaf = [&](const std::string& p) { return Leaf(p, smoothing); };
  if (name == "skip5-2") {
    return Interpolate({leaf("v w x y"), leaf("v w y"), leaf("v x y")},
                       "skip");
  }
  if (name == "skip5-3") {
    return Interpolate(
        {leaf("v w x y"), leaf("v w y"), leaf("v x y"), leaf("v w x")},
        "skip");
  }
  if (name == "skip5-rearranged") {
    return Interpolate(
        {leaf("v w x y"), leaf("x v w y"), leaf("w v x y"), leaf("y v w x")},
        "skip");
  }
  if (name.rfind("pairs", 0) == 0) {
    uint32_t order = static_cast<uint32_t>(std::stoul(name.substr(5)));
    if (order < 3 || order > 7) throw DataError("pairs preset: order 3..7");
    std::vector<ModelSpecNode> children;
    for (uint32_t a = 2; a <= order - 1; ++a) {
      for (uint32_t b = 1; b < a; ++b) {
        std::string p;
        p.push_back(static_cast<char>('z' - a));
        p.push_back(' ');
        p.push_back(static_cast<char>('z' - b));
        children.push_back(leaf(p));
      }
    }
    return Interpolate(std::move(children), "skip");
  }
  throw DataError("unknown skip preset: " + name);
}

ModelSpecNode ClusterSpec(const std::string& name, uint32_t order,
                          const std::string& smoothing) {
  std::string w_ctx = NgramPattern(order, false);
  std::string c_ctx = NgramPattern(order, true);
  std::string w_ctx_z = NgramPattern(order, false, true);
  std::string c_ctx_z = NgramPattern(order, true, true);
  // Index pattern alternates word and cluster slots at each distance.
  std::string index_ctx, index_ctx_z;
  for (uint32_t d = order - 1; d >= 1; --d) {
    char wl = static_cast<char>('z' - d);
    char cl = static_cast<char>(wl - 'a' + 'A');
    if (!index_ctx.empty()) index_ctx.push_back(' ');
    index_ctx.push_back(wl);
    index_ctx.push_back(' ');
    index_ctx.push_back(cl);
    if (d == 1) break;
  }
  index_ctx_z = index_ctx + " Z";

  auto wleaf = [&](const std::string& p) { return Leaf(p, smoothing); };
  auto cleaf = [&](const std::string& p) {
    return Leaf(p, smoothing, "cluster");
  };

  if (name == "ibm") {
    return Interpolate(
        {wleaf(w_ctx), Product(cleaf(c_ctx), wleaf("Z"))}, "ibm");
  }
  if (name == "fullibm") {
    return Interpolate(
        {wleaf(w_ctx), Product(cleaf(c_ctx), wleaf(c_ctx_z))}, "fullibm");
  }
  if (name == "index") {
    return wleaf(index_ctx);
  }
  if (name == "fullibmpredict") {
    return Product(
        Interpolate({cleaf(w_ctx), cleaf(c_ctx)}, "fip.c"),
        Interpolate({wleaf(w_ctx_z), wleaf(c_ctx_z)}, "fip.w"));
  }
  if (name == "indexpredict") {
    return Product(cleaf(index_ctx), wleaf(index_ctx_z));
  }
  if (name == "combinepredict") {
    return Interpolate(
        {wleaf(w_ctx), Product(cleaf(w_ctx), wleaf(w_ctx_z))}, "combine");
  }
  if (name == "allcombinenotop") {
    return Interpolate({wleaf(w_ctx), wleaf(c_ctx), wleaf(index_ctx),
                        Product(cleaf(w_ctx), wleaf(w_ctx_z)),
                        Product(cleaf(c_ctx), wleaf(c_ctx_z)),
                        Product(cleaf(index_ctx), wleaf(index_ctx_z))},
                       "allnotop");
  }
  if (name == "allcombine") {
    return Interpolate(
        {wleaf(w_ctx), wleaf(c_ctx), wleaf(index_ctx),
         Product(Interpolate({cleaf(w_ctx), cleaf(c_ctx), cleaf(index_ctx)},
                             "all.c"),
                 Interpolate({wleaf(w_ctx_z), wleaf(c_ctx_z),
                              wleaf(index_ctx_z)},
                             "all.w"))},
        "all");
  }
  throw DataError("unknown cluster preset: " + name);
}

ModelSpecNode CacheSpec(ModelSpecNode base, bool unigram_cache,
                        bool trigram_cache) {
  std::vector<ModelSpecNode> children;
  children.push_back(std::move(base));
  if (unigram_cache) {
    children.push_back(Cache("unigram", "word", false, "ucache"));
  }
  if (trigram_cache) {
    children.push_back(Cache("trigram", "word", false, "tcache"));
  }
  return Interpolate(std::move(children), "cache");
}

ModelSpecNode MixtureSpec(ModelSpecNode global_child, uint32_t S,
                          const std::string& smoothing, uint32_t order) {
  ModelSpecNode node;
  node.kind = "mixture";
  node.attrs["name"] = "sen";
  node.children.push_back(std::move(global_child));
  for (uint32_t j = 0; j < S; ++j) {
    node.children.push_back(
        Leaf(NgramPattern(order), smoothing, "word", static_cast<int>(j)));
  }
  return node;
}

ModelSpecNode EverythingSpec(const EverythingOptions& options) {
  const uint32_t order = options.order;
  const std::string& sm = options.smoothing;
  // The cluster-predictor and word-predictor factor share their component
  // layout: [sentence-specific word+cluster contexts], global word+cluster
  // contexts, three skip patterns in both granularities, then the caches.
  auto factor = [&](bool word_target, int type,
                    const std::string& name) -> ModelSpecNode {
    auto pat = [&](uint32_t ord, bool cluster_ctx, uint32_t skip_drop) {
      // skip_drop: 0 = none, else the distance left out of the context.
      std::string p;
      for (uint32_t d = ord - 1; d >= 1; --d) {
        if (d == skip_drop) {
          if (d == 1) break;
          continue;
        }
        char c = static_cast<char>('z' - d);
        if (cluster_ctx) c = static_cast<char>(c - 'a' + 'A');
        if (!p.empty()) p.push_back(' ');
        p.push_back(c);
        if (d == 1) break;
      }
      if (word_target) {
        if (!p.empty()) p.push_back(' ');
        p.push_back('Z');
      }
      return p;
    };
    const std::string predict = word_target ? "word" : "cluster";
    std::vector<ModelSpecNode> comps;
    if (type >= 0) {
      comps.push_back(Leaf(pat(order, false, 0), sm, predict, type));
      if (options.clusters) {
        comps.push_back(Leaf(pat(order, true, 0), sm, predict, type));
      }
    }
    comps.push_back(Leaf(pat(order, false, 0), sm, predict));
    if (options.clusters) {
      comps.push_back(Leaf(pat(order, true, 0), sm, predict));
    }
    if (options.skips && order >= 4) {
      for (uint32_t drop : {2u, 3u, 1u}) {
        // vw_y (drop 2-back), v_xy (drop 3-back), vwx_ (drop 1-back)
        comps.push_back(Leaf(pat(order, false, drop), sm, predict));
        if (options.clusters) {
          comps.push_back(Leaf(pat(order, true, drop), sm, predict));
        }
      }
    }
    if (options.caches) {
      comps.push_back(Cache("unigram", predict, word_target,
                            name + ".ucache"));
      comps.push_back(Cache("trigram", predict, word_target,
                            name + ".tcache"));
    }
    return Interpolate(std::move(comps), name);
  };

  auto product_for = [&](int type, const std::string& stem) {
    std::string tied = options.tied_type_weights && type >= 0 ? "t" :
        (type >= 0 ? std::to_string(type) : "g");
    ModelSpecNode p = Product(factor(false, type, stem + ".c" + tied),
                              factor(true, type, stem + ".w" + tied));
    return p;
  };

  if (options.sentence_types == 0) {
    ModelSpecNode root = product_for(-1, "ev");
    if (options.plus_normal_ngram) {
      return Interpolate({std::move(root), Leaf(NgramPattern(order), sm)},
                         "plus");
    }
    return root;
  }
  ModelSpecNode node;
  node.kind = "mixture";
  node.attrs["name"] = "sen";
  node.attrs["blend"] = "false";
  node.children.push_back(product_for(-1, "ev"));
  for (uint32_t j = 0; j < options.sentence_types; ++j) {
    node.children.push_back(product_for(static_cast<int>(j), "ev"));
  }
  if (options.plus_normal_ngram) {
    return Interpolate({std::move(node), Leaf(NgramPattern(order), sm)},
                       "plus");
  }
  return node;
}

ModelSpecNode ResolvePresetOrFile(const std::string& name, uint32_t order,
                                  const std::string& smoothing,
                                  uint32_t sentence_types) {
  if (!name.empty() && name[0] == '@') {
    return ReadModelSpecFile(name.substr(1));
  }
  if (name == "ngram") return NgramSpec(order, smoothing);
  if (name == "ngram-backoff") return NgramSpec(order, smoothing, "backoff");
  if (name == "ngram-modified") {
    return NgramSpec(order, smoothing, "interp", "modified");
  }
  if (name.rfind("skip", 0) == 0 || name.rfind("pairs", 0) == 0) {
    return SkipSpec(name, smoothing);
  }
  for (const char* c : {"ibm", "fullibm", "index", "fullibmpredict",
                        "indexpredict", "combinepredict", "allcombine",
                        "allcombinenotop"}) {
    if (name == c) return ClusterSpec(name, order, smoothing);
  }
  if (name == "ngram+unicache") {
    return CacheSpec(NgramSpec(order, smoothing), true, false);
  }
  if (name == "ngram+caches") {
    return CacheSpec(NgramSpec(order, smoothing), true, true);
  }
  if (name == "mixture") {
    return MixtureSpec(NgramSpec(order, smoothing), sentence_types, smoothing,
                       order);
  }
  if (name == "everything") {
    EverythingOptions opt;
    opt.order = order;
    opt.smoothing = smoothing;
    opt.sentence_types = sentence_types;
    return EverythingSpec(opt);
  }
  throw DataError("unknown model preset: " + name);
}

std::vector<std::string> PresetNames() {
  return {"ngram", "ngram-backoff", "ngram-modified", "skip5-2", "skip5-3",
          "skip5-rearranged", "pairs4", "pairs5", "pairs6", "pairs7", "ibm",
          "fullibm", "index", "fullibmpredict", "indexpredict",
          "combinepredict", "allcombine", "allcombinenotop", "ngram+unicache",
          "ngram+caches", "mixture", "everything"};
}

}  // namespace lmkit
