// lmkit/counts.cc

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

#include "lmkit/counts.h"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "lmkit/corpus.h"

namespace lmkit {

NeededCountsFilter NeededCountsFilter::PassThrough() {
  NeededCountsFilter f;
  f.pass_through_ = true;
  return f;
}

void NeededCountsFilter::AdmitKey(TokenSpan context, TokenId word) {
  TokenSeq key(context.begin(), context.end());
  key.push_back(word);
  keys_.insert(std::move(key));
  totals_.emplace(context.begin(), context.end());
}

void NeededCountsFilter::AdmitRow(TokenSpan context) {
  rows_.emplace(context.begin(), context.end());
}

void NeededCountsFilter::AdmitContinuations(TokenSpan context) {
  AdmitRow(context);
  continuation_rows_.emplace(context.begin(), context.end());
}

bool NeededCountsFilter::AdmitsRow(TokenSpan context) const {
  if (pass_through_) return true;
  return rows_.find(context) != rows_.end();
}

bool NeededCountsFilter::AdmitsTotal(TokenSpan context) const {
  if (pass_through_) return true;
  return totals_.find(context) != totals_.end();
}

bool NeededCountsFilter::AdmitsKey(TokenSpan context, TokenId word) const {
  if (pass_through_) return true;
  TokenSeq key(context.begin(), context.end());
  key.push_back(word);
  return keys_.find(key) != keys_.end();
}

bool NeededCountsFilter::WantsContinuations(TokenSpan context) const {
  if (pass_through_) return true;
  return continuation_rows_.find(context) != continuation_rows_.end();
}

const SuccessorEntry* CountRow::Find(TokenId word) const {
  auto it = std::lower_bound(
      successors.begin(), successors.end(), word,
      [](const SuccessorEntry& e, TokenId w) { return e.word < w; });
  if (it == successors.end() || it->word != word) return nullptr;
  return &*it;
}

CountStore::BuildRow& CountStore::MutableRow(TokenSpan context) {
  auto it = building_.find(context);
  if (it == building_.end()) {
    it = building_.emplace(TokenSeq(context.begin(), context.end()), BuildRow())
             .first;
  }
  return it->second;
}

void CountStore::AddEvent(TokenSpan context, TokenId word, uint64_t count) {
  if (finalized_) throw DataError("count store: add after finalize");
  BuildRow& row = MutableRow(context);
  row.total += count;
  SuccessorEntry& e = row.successors[word];
  e.word = word;
  e.count += count;
  if (context.empty()) total_events_ += count;
}

void CountStore::AddTotalOnly(TokenSpan context, uint64_t count) {
  if (finalized_) throw DataError("count store: add after finalize");
  MutableRow(context).total += count;
  if (context.empty()) total_events_ += count;
}

void CountStore::AddKeyOnly(TokenSpan context, TokenId word, uint64_t count) {
  if (finalized_) throw DataError("count store: add after finalize");
  SuccessorEntry& e = MutableRow(context).successors[word];
  e.word = word;
  e.count += count;
}

void CountStore::AddContinuation(TokenSpan context, TokenId word,
                                 uint32_t count) {
  if (finalized_) throw DataError("count store: add after finalize");
  BuildRow& row = MutableRow(context);
  SuccessorEntry& e = row.successors[word];
  e.word = word;
  e.continuation += count;
}

void CountStore::AddFilteredEvent(const NeededCountsFilter& filter,
                                  TokenSpan context, TokenId word) {
  if (filter.AdmitsRow(context)) {
    AddEvent(context, word);
    return;
  }
  if (filter.AdmitsTotal(context)) {
    AddTotalOnly(context);
    if (filter.AdmitsKey(context, word)) AddKeyOnly(context, word);
  }
}

void CountStore::MergeFrom(const CountStore& other) {
  if (finalized_ || other.finalized_) {
    throw DataError("count store: merge requires unfinalized stores");
  }
  for (const auto& [ctx, brow] : other.building_) {
    BuildRow& row = MutableRow(ctx);
    row.total += brow.total;
    for (const auto& [word, e] : brow.successors) {
      SuccessorEntry& mine = row.successors[word];
      mine.word = word;
      mine.count += e.count;
      mine.continuation += e.continuation;
    }
  }
  total_events_ += other.total_events_;
}

void CountStore::Finalize() {
  if (finalized_) return;
  rows_.reserve(building_.size());
  for (auto& [ctx, brow] : building_) {
    CountRow row;
    row.total = brow.total;
    row.successors.reserve(brow.successors.size());
    for (auto& [word, e] : brow.successors) row.successors.push_back(e);
    std::sort(row.successors.begin(), row.successors.end(),
              [](const SuccessorEntry& a, const SuccessorEntry& b) {
                return a.word < b.word;
              });
    for (const SuccessorEntry& e : row.successors) {
      if (e.count > 0) {
        ++row.types;
        ++row.band_types[e.count >= 3 ? 2 : e.count - 1];
      }
      if (e.continuation > 0) {
        row.continuation_total += e.continuation;
        ++row.continuation_types;
        ++row.cont_band_types[e.continuation >= 3 ? 2 : e.continuation - 1];
      }
    }
    rows_.emplace(ctx, std::move(row));
  }
  building_.clear();
  finalized_ = true;
}

const CountRow* CountStore::Row(TokenSpan context) const {
  if (!finalized_) throw DataError("count store: query before finalize");
  if (audit_filter_ && !audit_filter_->AdmitsRow(context) &&
      !audit_filter_->AdmitsTotal(context)) {
    audit_violations_.fetch_add(1, std::memory_order_relaxed);
  }
  auto it = rows_.find(context);
  return it == rows_.end() ? nullptr : &it->second;
}

uint64_t CountStore::Count(TokenSpan context, TokenId word) const {
  const CountRow* row = Row(context);
  if (!row) return 0;
  const SuccessorEntry* e = row->Find(word);
  return e ? e->count : 0;
}

uint64_t CountStore::Count(TokenSpan sequence) const {
  if (sequence.empty()) return total_events_;
  return Count(sequence.first(sequence.size() - 1), sequence.back());
}

uint32_t CountStore::Continuation(TokenSpan context, TokenId word) const {
  const CountRow* row = Row(context);
  if (!row) return 0;
  const SuccessorEntry* e = row->Find(word);
  return e ? e->continuation : 0;
}

uint64_t CountStore::ContextTotal(TokenSpan context) const {
  const CountRow* row = Row(context);
  return row ? row->total : 0;
}

void CountStore::AttachFilterAudit(
    std::shared_ptr<const NeededCountsFilter> filter) {
  audit_filter_ = std::move(filter);
}

// Binary count file: little-endian, rows sorted by context key.
//   magic "LMKC", u32 version, u32 max_order, u64 row count,
//   then per row: u8 context length, u32 ids..., u64 total,
//                 u32 n_successors, per successor u32 id, u64 count, u32 cont.
namespace {

template <typename T>
void PutRaw(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T GetRaw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("count file: truncated");
  return v;
}

constexpr char kMagic[4] = {'L', 'M', 'K', 'C'};
constexpr uint32_t kVersion = 1;

}  // namespace

void CountStore::Write(std::ostream& out, uint32_t max_order) const {
  if (!finalized_) throw DataError("count store: write before finalize");
  out.write(kMagic, 4);
  PutRaw<uint32_t>(out, kVersion);
  PutRaw<uint32_t>(out, max_order);
  std::map<TokenSeq, const CountRow*> sorted;
  for (const auto& [ctx, row] : rows_) sorted.emplace(ctx, &row);
  PutRaw<uint64_t>(out, sorted.size());
  for (const auto& [ctx, row] : sorted) {
    PutRaw<uint8_t>(out, static_cast<uint8_t>(ctx.size()));
    for (TokenId id : ctx) PutRaw<uint32_t>(out, id);
    PutRaw<uint64_t>(out, row->total);
    PutRaw<uint32_t>(out, static_cast<uint32_t>(row->successors.size()));
    for (const SuccessorEntry& e : row->successors) {
      PutRaw<uint32_t>(out, e.word);
      PutRaw<uint64_t>(out, e.count);
      PutRaw<uint32_t>(out, e.continuation);
    }
  }
}

CountStore CountStore::ReadFrom(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || !std::equal(magic, magic + 4, kMagic)) {
    throw DataError("count file: bad magic");
  }
  uint32_t version = GetRaw<uint32_t>(in);
  if (version != kVersion) throw DataError("count file: unsupported version");
  (void)GetRaw<uint32_t>(in);  // max_order, informational
  uint64_t n_rows = GetRaw<uint64_t>(in);
  CountStore store;
  for (uint64_t i = 0; i < n_rows; ++i) {
    uint8_t len = GetRaw<uint8_t>(in);
    TokenSeq ctx(len);
    for (auto& id : ctx) id = GetRaw<uint32_t>(in);
    uint64_t total = GetRaw<uint64_t>(in);
    uint32_t n_succ = GetRaw<uint32_t>(in);
    BuildRow row;
    row.total = total;
    for (uint32_t s = 0; s < n_succ; ++s) {
      SuccessorEntry e;
      e.word = GetRaw<uint32_t>(in);
      e.count = GetRaw<uint64_t>(in);
      e.continuation = GetRaw<uint32_t>(in);
      row.successors.emplace(e.word, e);
    }
    if (ctx.empty()) store.total_events_ = total;
    store.building_.emplace(std::move(ctx), std::move(row));
  }
  store.Finalize();
  return store;
}

namespace {

// One pass over a range of sentences.  Continuation counting tracks first
// occurrences of one-longer-left extensions in a membership set only; the
// set is discarded after the pass.
void CountRange(const Corpus& corpus, size_t begin, size_t end,
                const NeededCountsFilter& filter, uint32_t max_order,
                CountStore* store) {
  std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> seen_extensions;
  TokenSeq key;
  for (size_t si = begin; si < end; ++si) {
    const Sentence& sent = corpus.sentences[si];
    TokenSeq padded = PadSentence(sent, max_order);
    uint32_t first = max_order - 1;
    for (uint32_t i = first; i < padded.size(); ++i) {
      TokenId word = padded[i];
      for (uint32_t len = 0; len < max_order; ++len) {
        if (len > i) break;
        TokenSpan context(&padded[i - len], len);
        store->AddFilteredEvent(filter, context, word);
        // Continuation counts for the one-shorter suffix: the leftmost
        // context token is the left extension of (suffix, word).
        if (len >= 1) {
          TokenSpan suffix(&padded[i - len + 1], len - 1);
          if (filter.WantsContinuations(suffix)) {
            key.assign(context.begin(), context.end());
            key.push_back(word);
            if (seen_extensions.insert(key).second) {
              store->AddContinuation(suffix, word);
            }
          }
        }
      }
    }
  }
}

}  // namespace

CountStore AccumulateCounts(const Corpus& corpus,
                            const NeededCountsFilter& filter,
                            uint32_t max_order, unsigned num_shards) {
  if (max_order < 1 || max_order > 20) {
    throw DataError("counting: order must be in [1, 20]");
  }
  if (num_shards <= 1 || corpus.sentences.size() < 2 * num_shards) {
    CountStore store;
    CountRange(corpus, 0, corpus.sentences.size(), filter, max_order, &store);
    store.Finalize();
    return store;
  }
  // Shards must not share first-seen extension state, so each shard counts
  // continuation candidates independently; a (context, word) extension seen
  // in two shards would be double counted.  To keep the merge exact, shard
  // counting records plain events only and a final sequential pass redoes
  // continuation counting globally.
  std::vector<CountStore> shards(num_shards);
  std::vector<std::thread> threads;
  size_t per = (corpus.sentences.size() + num_shards - 1) / num_shards;
  for (unsigned t = 0; t < num_shards; ++t) {
    size_t b = t * per;
    size_t e = std::min(corpus.sentences.size(), b + per);
    threads.emplace_back([&corpus, &filter, max_order, b, e, t, &shards]() {
      CountStore local;
      for (size_t si = b; si < e; ++si) {
        const Sentence& sent = corpus.sentences[si];
        TokenSeq padded = PadSentence(sent, max_order);
        for (uint32_t i = max_order - 1; i < padded.size(); ++i) {
          TokenId word = padded[i];
          for (uint32_t len = 0; len < max_order; ++len) {
            if (len > i) break;
            TokenSpan context(&padded[i - len], len);
            local.AddFilteredEvent(filter, context, word);
          }
        }
      }
      shards[t] = std::move(local);
    });
  }
  for (auto& th : threads) th.join();
  CountStore store;
  for (CountStore& s : shards) store.MergeFrom(s);
  // Continuations in one deterministic pass.
  {
    std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> seen;
    TokenSeq key;
    for (const Sentence& sent : corpus.sentences) {
      TokenSeq padded = PadSentence(sent, max_order);
      for (uint32_t i = max_order - 1; i < padded.size(); ++i) {
        TokenId word = padded[i];
        for (uint32_t len = 1; len < max_order; ++len) {
          if (len > i) break;
          TokenSpan context(&padded[i - len], len);
          TokenSpan suffix(&padded[i - len + 1], len - 1);
          if (!filter.WantsContinuations(suffix)) continue;
          key.assign(context.begin(), context.end());
          key.push_back(word);
          if (seen.insert(key).second) store.AddContinuation(suffix, word);
        }
      }
    }
  }
  store.Finalize();
  return store;
}

void CountOfCountsSampler::Observe(TokenSpan sequence) {
  uint64_t h = HashTokenSeq(sequence);
  if (h % modulus_ != 0) return;
  ++counts_[TokenSeq(sequence.begin(), sequence.end())];
  // Grow the modulus whenever the admitted set overflows the window;
  // entries admitted at 2s are a subset of those admitted at s.
  while (counts_.size() > 2 * target_) {
    modulus_ *= 2;
    for (auto it = counts_.begin(); it != counts_.end();) {
      if (HashTokenSeq(it->first) % modulus_ != 0) {
        it = counts_.erase(it);
      } else {
        ++it;
      }
    }
  }
}

CountOfCounts CountOfCountsSampler::Extract(uint32_t order) const {
  CountOfCounts cc;
  cc.order = order;
  cc.max_r = max_r_;
  cc.sample_size = counts_.size();
  cc.sampling_modulus = modulus_;
  // Fallback means the corpus cannot produce even the minimum viable
  // sample, in which case the table is exact rather than estimated.
  cc.exhaustive_fallback = (modulus_ == 1 && counts_.size() < 1000);
  cc.n_r.assign(max_r_ + 2, 0.0);
  for (const auto& [seq, count] : counts_) {
    if (count <= max_r_ + 1) cc.n_r[count] += 1.0;
  }
  cc.ratios.assign(max_r_ + 1, 0.0);
  for (uint32_t r = 1; r <= max_r_; ++r) {
    cc.ratios[r] = cc.n_r[r] > 0 ? cc.n_r[r + 1] / cc.n_r[r] : 0.0;
  }
  return cc;
}

std::vector<CountOfCounts> SampleCountOfCounts(const Corpus& corpus,
                                               uint32_t max_order,
                                               uint64_t target_sample,
                                               uint32_t max_r) {
  if (target_sample < 1000) {
    throw DataError("count-of-counts: target sample must be >= 1000");
  }
  if (max_r < 2) throw DataError("count-of-counts: max_r must be >= 2");
  std::vector<CountOfCountsSampler> samplers;
  samplers.reserve(max_order);
  for (uint32_t order = 1; order <= max_order; ++order) {
    samplers.emplace_back(target_sample, max_r);
  }
  for (const Sentence& sent : corpus.sentences) {
    TokenSeq padded = PadSentence(sent, max_order);
    for (uint32_t i = max_order - 1; i < padded.size(); ++i) {
      for (uint32_t order = 1; order <= max_order; ++order) {
        if (order - 1 > i) break;
        samplers[order - 1].Observe(TokenSpan(&padded[i - order + 1], order));
      }
    }
  }
  std::vector<CountOfCounts> result;
  for (uint32_t order = 1; order <= max_order; ++order) {
    result.push_back(samplers[order - 1].Extract(order));
  }
  return result;
}

}  // namespace lmkit
