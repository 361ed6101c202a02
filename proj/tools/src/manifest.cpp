#include "manifest.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace catport::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

fs::path update_manifest(const std::vector<fs::path>& outputs, const nlohmann::json& config) {
  if (outputs.empty()) throw std::invalid_argument("manifest needs at least one output");
  const fs::path dir = fs::absolute(outputs.front()).parent_path();
  const fs::path path = dir / "manifest.json";
  nlohmann::json m;
  if (std::ifstream in(path); in) {
    try {
      in >> m;
    } catch (const nlohmann::json::exception&) {
      m = nlohmann::json::object();
    }
  }
  if (!m.is_object() || m.value("schema", 0) != kManifestSchema) m = nlohmann::json::object();
  m["schema"] = kManifestSchema;
  m["timestamp"] = utc_timestamp();
  auto& files = m["outputs"];
  if (!files.is_object()) files = nlohmann::json::object();
  for (const auto& out : outputs) {
    const auto name = fs::relative(fs::absolute(out), dir).generic_string();
    files[name] = {{"sha256", sha256_file(out)}, {"bytes", fs::file_size(out)}, {"config", config}};
  }
  std::ofstream(path) << m.dump(2) << '\n';
  return path;
}

}  // namespace catport::cli
