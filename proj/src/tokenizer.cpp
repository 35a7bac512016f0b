// Copyright 2026 The cfh Authors. All Rights Reserved.
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

#include "cfh/tokenizer.hpp"

#include <algorithm>
#include <cctype>

#include "cfh/common.hpp"

namespace cfh {

CharTokenizer::CharTokenizer(std::string alphabet) : alphabet_(std::move(alphabet)) {
  if (alphabet_.empty()) throw InvalidInput("tokenizer: empty alphabet");
  std::fill(std::begin(lookup_), std::end(lookup_), kUnk);
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    const auto c = static_cast<unsigned char>(alphabet_[i]);
    if (lookup_[c] != kUnk) throw InvalidInput("tokenizer: duplicate alphabet character");
    lookup_[c] = kNumSpecials + static_cast<int>(i);
  }
}

TokenSequence CharTokenizer::encode(std::string_view text) const {
  TokenSequence out;
  out.reserve(text.size());
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(ch)));
    out.push_back(lookup_[c]);
  }
  return out;
}

std::string CharTokenizer::decode(std::span<const int> tokens) const {
  std::string out;
  for (const int t : tokens) {
    if (t == kUnk) {
      out.push_back('?');
    } else if (t >= kNumSpecials && t < vocab_size()) {
      out.push_back(alphabet_[static_cast<std::size_t>(t - kNumSpecials)]);
    }
  }
  return out;
}

}  // namespace cfh
