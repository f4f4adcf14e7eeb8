#include "secidx/aead.hpp"

#include "secidx/error.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <string>

namespace secidx::aead {
namespace {

constexpr std::size_t kNonceLen = 12;
constexpr std::size_t kTagLen = 16;

using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CtxPtr make_ctx() {
    CtxPtr ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
    return ctx;
}

} // namespace

Key random_key(Rng& rng) {
    Key key;
    for (auto& b : key.bytes) b = static_cast<std::uint8_t>(rng.uniform_u64(0, 255));
    return key;
}

std::vector<std::uint8_t> seal(const Key& key, const std::vector<std::uint8_t>& plaintext,
                               Rng& rng) {
    std::vector<std::uint8_t> blob(kNonceLen + plaintext.size() + kTagLen);
    for (std::size_t i = 0; i < kNonceLen; ++i)
        blob[i] = static_cast<std::uint8_t>(rng.uniform_u64(0, 255));

    auto ctx = make_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(), blob.data()) != 1)
        throw Error("EncryptInit failed");
    int len = 0;
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), blob.data() + kNonceLen, &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        throw Error("EncryptUpdate failed");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), blob.data() + kNonceLen + len, &fin) != 1)
        throw Error("EncryptFinal failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                            blob.data() + kNonceLen + plaintext.size()) != 1)
        throw Error("GCM get tag failed");
    return blob;
}

std::vector<std::uint8_t> open(const Key& key, const std::vector<std::uint8_t>& blob) {
    if (blob.size() < kNonceLen + kTagLen) throw DomainError("aead: blob too short");
    std::size_t ct_len = blob.size() - kNonceLen - kTagLen;
    std::vector<std::uint8_t> plain(ct_len);

    auto ctx = make_ctx();
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(), blob.data()) != 1)
        throw Error("DecryptInit failed");
    int len = 0;
    if (ct_len > 0 &&
        EVP_DecryptUpdate(ctx.get(), plain.data(), &len, blob.data() + kNonceLen,
                          static_cast<int>(ct_len)) != 1)
        throw DomainError("aead: decrypt failed");
    std::vector<std::uint8_t> tag(blob.end() - kTagLen, blob.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) != 1)
        throw Error("GCM set tag failed");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &fin) != 1)
        throw DomainError("aead: authentication failed");
    return plain;
}

void save_key(const Key& key, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot write key file: " + file.string());
    out.write(reinterpret_cast<const char*>(key.bytes.data()),
              static_cast<std::streamsize>(key.bytes.size()));
}

Key load_key(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read key file: " + file.string());
    Key key;
    in.read(reinterpret_cast<char*>(key.bytes.data()),
            static_cast<std::streamsize>(key.bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(key.bytes.size()))
        throw ConfigError("key file truncated: " + file.string());
    return key;
}

void write_sealed_file(const Key& key, const std::filesystem::path& file,
                       const std::string& plaintext, Rng& rng) {
    std::vector<std::uint8_t> bytes(plaintext.begin(), plaintext.end());
    auto blob = seal(key, bytes, rng);
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot write sealed file: " + file.string());
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
}

std::string read_sealed_file(const Key& key, const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read sealed file: " + file.string());
    std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    auto plain = open(key, blob);
    return std::string(plain.begin(), plain.end());
}

} // namespace secidx::aead
