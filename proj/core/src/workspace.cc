// Copyright 2026 The Rulewise Authors.
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

#include "rulewise/workspace.h"

#include <openssl/evp.h>

#include <memory>

#include "rulewise/error.h"

namespace rulewise {

Workspace::Workspace(Corpus corpus, DictionarySet dictionaries,
                     PredicateCatalog catalog)
    : corpus_(std::move(corpus)),
      dictionaries_(std::move(dictionaries)),
      catalog_(std::move(catalog)),
      index_(BuildMatchIndex(catalog_, corpus_, dictionaries_)),
      fingerprint_(DataFingerprint(corpus_, dictionaries_)) {}

std::shared_ptr<const Workspace> Workspace::Build(
    Corpus corpus, DictionarySet dictionaries, const CatalogConfig &config,
    std::span<const PredicateKey> extra) {
  PredicateCatalog catalog = BuildCatalog(corpus, dictionaries, config);
  for (const auto &key : extra) catalog.Intern(key);
  return std::make_shared<const Workspace>(
      std::move(corpus), std::move(dictionaries), std::move(catalog));
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kFailedPrecondition, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

std::string DataFingerprint(const Corpus &corpus,
                            const DictionarySet &dictionaries) {
  std::string data = SerializeCorpus(corpus);
  data += "\x1e";
  data += SerializeDictionaries(dictionaries);
  return Sha256Hex(data);
}

}  // namespace rulewise
