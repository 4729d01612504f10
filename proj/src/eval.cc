// lmkit/eval.cc

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

#include "lmkit/eval.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace lmkit {

namespace {

// Shared streaming walk: for every predicted position calls
// visit(ctx, word, document) before the model state advances.  Handles
// padding, cache resets at article boundaries, mixture sentence starts and
// cache updates.
template <typename Visit>
void WalkStream(const Model& model, const ModelNode& node,
                const Corpus& stream, Visit&& visit) {
  CacheState cache = model.MakeCacheState();
  MixtureScratch scratch;
  uint32_t pad = model.max_distance;
  uint32_t current_doc = 0;
  bool first = true;
  for (const Sentence& sent : stream.sentences) {
    if (first || sent.document != current_doc) {
      cache.Clear();
      current_doc = sent.document;
      first = false;
    }
    TokenSeq padded = PadSentence(sent, pad + 1);
    EvalContext ctx;
    ctx.padded = &padded;
    ctx.cache = model.uses_cache ? &cache : nullptr;
    ctx.mixture = &scratch;
    node.StartSentence(ctx);
    for (uint32_t i = pad; i < padded.size(); ++i) {
      ctx.position = i;
      TokenId word = padded[i];
      visit(ctx, word, current_doc);
      node.Advance(ctx, word);
      if (model.uses_cache) cache.Update(word);
    }
  }
}

std::string DescribeEvent(const Model& model, const EvalContext& ctx,
                          TokenId word) {
  const Vocabulary& vocab = *model.resources.vocab;
  std::ostringstream ss;
  ss << "P(" << vocab.Text(word) << " |";
  uint32_t from = ctx.position >= 4 ? ctx.position - 4 : 0;
  for (uint32_t k = from; k < ctx.position; ++k) {
    ss << ' ' << vocab.Text((*ctx.padded)[k]);
  }
  ss << ")";
  return ss.str();
}

}  // namespace

EvalReport EvaluateNode(const Model& model, const ModelNode& node,
                        const Corpus& stream, const std::string& stream_id) {
  EvalReport report;
  report.stream_id = stream_id;
  DocumentStats doc;
  KahanSum doc_sum;
  bool have_doc = false;
  auto flush_doc = [&]() {
    if (!have_doc) return;
    doc.log2_sum = doc_sum.Value();
    report.per_document.push_back(doc);
  };
  WalkStream(model, node, stream,
             [&](const EvalContext& ctx, TokenId word, uint32_t document) {
    if (!have_doc || document != doc.document) {
      flush_doc();
      doc = DocumentStats{document, 0, 0.0};
      doc_sum = KahanSum();
      have_doc = true;
    }
    double p = node.Prob(ctx, word);
    if (!(p > 0) || !std::isfinite(p)) {
      throw NumericalError("zero or invalid probability for event " +
                           DescribeEvent(model, ctx, word));
    }
    if (word == kUnknown) {
      ++report.excluded_tokens;
    } else {
      ++report.scored_tokens;
      ++doc.scored;
      doc_sum.Add(std::log2(p));
    }
  });
  flush_doc();
  // Aggregate per-document partials in document order.
  KahanSum total;
  for (const DocumentStats& d : report.per_document) total.Add(d.log2_sum);
  report.entropy_bits = report.scored_tokens == 0
                            ? 0
                            : -total.Value() / static_cast<double>(
                                                   report.scored_tokens);
  report.perplexity = std::exp2(report.entropy_bits);
  return report;
}

EvalReport Evaluate(const Model& model, const Corpus& stream,
                    const std::string& stream_id) {
  return EvaluateNode(model, *model.root, stream, stream_id);
}

NormalizationCheck VerifyNormalization(const Model& model,
                                       const Corpus& stream, double tolerance,
                                       uint64_t max_positions, uint64_t seed) {
  NormalizationCheck check;
  uint64_t total_positions = 0;
  for (const Sentence& s : stream.sentences) {
    total_positions += s.tokens.size();
  }
  double keep_fraction =
      max_positions == 0
          ? 1.0
          : std::min(1.0, static_cast<double>(max_positions) /
                              std::max<uint64_t>(1, total_positions));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vocabulary& vocab = *model.resources.vocab;
  const ModelNode& node = *model.root;
  WalkStream(model, node, stream,
             [&](const EvalContext& ctx, TokenId word, uint32_t) {
    if (max_positions > 0 &&
        (check.positions_checked >= max_positions ||
         unif(rng) > keep_fraction)) {
      return;
    }
    double target_first = node.Prob(ctx, word);
    KahanSum sum;
    double target_in_sweep = -1;
    for (TokenId w = 0; w < vocab.size(); ++w) {
      if (w == kBegin) continue;
      double p = node.Prob(ctx, w);
      sum.Add(p);
      if (w == word) target_in_sweep = p;
    }
    ++check.positions_checked;
    double dev = std::abs(sum.Value() - 1.0);
    check.max_deviation = std::max(check.max_deviation, dev);
    if (dev > tolerance) {
      check.ok = false;
      if (check.failures.size() < 16) {
        std::ostringstream ss;
        ss << "sum=" << sum.Value() << " at " << DescribeEvent(model, ctx, word);
        check.failures.push_back(ss.str());
      }
    }
    if (target_in_sweep != target_first) {
      check.ok = false;
      if (check.failures.size() < 16) {
        check.failures.push_back("score-everything mismatch at " +
                                 DescribeEvent(model, ctx, word));
      }
    }
  });
  return check;
}

double PerplexityReduction(double entropy_delta_bits) {
  return 1.0 - std::exp2(-entropy_delta_bits);
}

ComparisonReport Compare(const EvalReport& baseline,
                         const EvalReport& candidate) {
  if (baseline.stream_id != candidate.stream_id) {
    throw DataError("compare: reports are for different streams ('" +
                    baseline.stream_id + "' vs '" + candidate.stream_id +
                    "')");
  }
  ComparisonReport cmp;
  cmp.baseline = baseline;
  cmp.candidate = candidate;
  cmp.entropy_delta = baseline.entropy_bits - candidate.entropy_bits;
  cmp.perplexity_reduction = PerplexityReduction(cmp.entropy_delta);
  return cmp;
}

// -- report io --------------------------------------------------------------

void EvalReport::WriteCsv(std::ostream& out) const {
  out << "# lmkit-report-v1\n";
  out << "stream,entropy_bits,perplexity,scored_tokens,excluded_tokens\n";
  out << stream_id << ',' << entropy_bits << ',' << perplexity << ','
      << scored_tokens << ',' << excluded_tokens << '\n';
  out << "document,scored,log2_sum\n";
  for (const DocumentStats& d : per_document) {
    out << d.document << ',' << d.scored << ',' << d.log2_sum << '\n';
  }
}

EvalReport EvalReport::ReadCsv(std::istream& in) {
  EvalReport r;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# lmkit-report-v1", 0) != 0) {
    throw DataError("report: bad header");
  }
  if (!std::getline(in, line)) throw DataError("report: truncated");
  if (!std::getline(in, line)) throw DataError("report: truncated");
  std::istringstream ss(line);
  std::string field;
  std::getline(ss, r.stream_id, ',');
  std::getline(ss, field, ',');
  r.entropy_bits = std::stod(field);
  std::getline(ss, field, ',');
  r.perplexity = std::stod(field);
  std::getline(ss, field, ',');
  r.scored_tokens = std::stoull(field);
  std::getline(ss, field, ',');
  r.excluded_tokens = std::stoull(field);
  if (std::getline(in, line)) {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ds(line);
      DocumentStats d;
      std::getline(ds, field, ',');
      d.document = static_cast<uint32_t>(std::stoul(field));
      std::getline(ds, field, ',');
      d.scored = std::stoull(field);
      std::getline(ds, field, ',');
      d.log2_sum = std::stod(field);
      r.per_document.push_back(d);
    }
  }
  return r;
}

void EvalReport::WriteSummary(std::ostream& out) const {
  out << "stream:    " << stream_id << '\n'
      << "entropy:   " << entropy_bits << " bits/word\n"
      << "perplexity: " << perplexity << '\n'
      << "scored:    " << scored_tokens << " tokens ("
      << excluded_tokens << " unknown excluded)\n";
}

void ComparisonReport::WriteCsv(std::ostream& out) const {
  out << "# lmkit-comparison-v1\n";
  out << "stream,baseline_entropy,candidate_entropy,entropy_delta,"
         "perplexity_reduction_percent\n";
  out << baseline.stream_id << ',' << baseline.entropy_bits << ','
      << candidate.entropy_bits << ',' << entropy_delta << ','
      << 100.0 * perplexity_reduction << '\n';
}

void ComparisonReport::WriteSummary(std::ostream& out) const {
  out << "baseline:  " << baseline.entropy_bits << " bits ("
      << baseline.perplexity << " ppl)\n"
      << "candidate: " << candidate.entropy_bits << " bits ("
      << candidate.perplexity << " ppl)\n"
      << "delta:     " << entropy_delta << " bits => "
      << 100.0 * perplexity_reduction << "% perplexity reduction\n";
  // Reference conversions, entropy reduction to perplexity reduction.
  out << "conversion table: ";
  for (double bits : {0.01, 0.1, 0.16, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0}) {
    out << bits << "->" << 100.0 * PerplexityReduction(bits) << "% ";
  }
  out << '\n';
}

}  // namespace lmkit
