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

#ifndef CFH_TOKENIZER_HPP
#define CFH_TOKENIZER_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfh {

using TokenSequence = std::vector<int>;

inline constexpr int kSot = 0;
inline constexpr int kEot = 1;
inline constexpr int kPad = 2;
inline constexpr int kUnk = 3;
inline constexpr int kNumSpecials = 4;

inline constexpr std::string_view kDefaultAlphabet = "abcdefghijklmnopqrstuvwxyz '";

/// Character-level tokenizer. Ids 0-3 are the specials; alphabet character i
/// maps to id 4 + i.
class CharTokenizer {
 public:
  explicit CharTokenizer(std::string alphabet = std::string(kDefaultAlphabet));

  int vocab_size() const { return kNumSpecials + static_cast<int>(alphabet_.size()); }
  const std::string& alphabet() const { return alphabet_; }

  /// Lowercases; characters outside the alphabet become kUnk. No specials added.
  TokenSequence encode(std::string_view text) const;

  /// Drops specials; kUnk renders as '?'.
  std::string decode(std::span<const int> tokens) const;

 private:
  std::string alphabet_;
  int lookup_[256];
};

}  // namespace cfh

#endif  // CFH_TOKENIZER_HPP
