// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "nsm/encoder.hpp"
#include "nsm/graph_io.hpp"
#include "nsm/version.hpp"

namespace nsm {

struct Checkpoint {
  EncoderParams params;
  double tau = 0.0;  // calibrated decision threshold
};

namespace detail {

inline void write_f64_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline double read_f64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw FormatError("checkpoint: truncated float payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("checkpoint: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline constexpr char kCheckpointMagic[8] = {'N', 'S', 'M', 'C', 'K', 'P', 'T', '1'};

// Versioned container: magic, length-prefixed JSON header (config, tau,
// section table), then the parameter arrays as little-endian 64-bit floats in
// header order. A text manifest with the section shapes is written alongside.
inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["tool_version"] = kVersion;
  header["tau"] = ckpt.tau;
  header["label_alphabet_size"] = ckpt.params.label_alphabet_size;
  header["encoder"] = {{"num_layers", ckpt.params.config.num_layers},
                       {"hidden_dim", ckpt.params.config.hidden_dim},
                       {"out_dim", ckpt.params.config.out_dim},
                       {"combine", combine_mode_name(ckpt.params.config.combine)},
                       {"clamp_floor", ckpt.params.config.clamp_floor}};
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& p : ckpt.params.store)
    sections.push_back({{"name", p.name}, {"rows", p.rows}, {"cols", p.cols}});
  header["sections"] = sections;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint: " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::string hdr = header.dump();
  detail::write_u32_le(out, static_cast<std::uint32_t>(hdr.size()));
  out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  for (const auto& p : ckpt.params.store)
    for (double v : p.value) detail::write_f64_le(out, v);
  out.flush();
  if (!out) throw FormatError("checkpoint write failed: " + path.string());

  std::ofstream manifest(path.string() + ".manifest");
  manifest << "checkpoint " << path.filename().string() << "\n";
  for (const auto& p : ckpt.params.store)
    manifest << p.name << " " << p.rows << " " << p.cols << "\n";
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("missing checkpoint: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw FormatError("not a checkpoint file: " + path.string());
  const std::uint32_t hdr_len = detail::read_u32_le(in);
  std::string hdr(hdr_len, '\0');
  in.read(hdr.data(), hdr_len);
  if (!in) throw FormatError("checkpoint: truncated header json");
  nlohmann::json header = nlohmann::json::parse(hdr);
  if (header.at("format_version").get<int>() != 1)
    throw FormatError("checkpoint: unsupported format version");

  Checkpoint ckpt;
  ckpt.tau = header.at("tau").get<double>();
  const auto& enc = header.at("encoder");
  ckpt.params.config.num_layers = enc.at("num_layers").get<int>();
  ckpt.params.config.hidden_dim = enc.at("hidden_dim").get<int>();
  ckpt.params.config.out_dim = enc.at("out_dim").get<int>();
  ckpt.params.config.clamp_floor = enc.at("clamp_floor").get<double>();
  const std::string combine = enc.at("combine").get<std::string>();
  if (combine == "gru") ckpt.params.config.combine = CombineMode::gru;
  else if (combine == "sum_ablation") ckpt.params.config.combine = CombineMode::sum_ablation;
  else throw FormatError("checkpoint: unknown combine mode " + combine);
  ckpt.params.label_alphabet_size = header.at("label_alphabet_size").get<int>();
  ckpt.params.config.validate();

  for (const auto& s : header.at("sections")) {
    const int rows = s.at("rows").get<int>(), cols = s.at("cols").get<int>();
    std::vector<double> vals(static_cast<std::size_t>(rows) * cols);
    for (auto& v : vals) v = detail::read_f64_le(in);
    ckpt.params.store.add(s.at("name").get<std::string>(), rows, cols, std::move(vals));
  }
  return ckpt;
}

// Git-style blob hash of a file: sha1("blob <size>\0" + contents), hex.
inline std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot hash missing file: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string preimage = "blob " + std::to_string(content.size()) + '\0' + content;

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, preimage.data(), preimage.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);

  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace nsm
