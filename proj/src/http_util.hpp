#pragma once

#include <string>
#include <string_view>

#include "paraeval/errors.hpp"

namespace paraeval::detail {

/// "https://host:8443/v1/chat" -> origin "https://host:8443", path "/v1/chat".
struct SplitUrl {
  std::string origin;
  std::string path;
};

inline SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) {
    throw ConfigError("URL must start with a scheme such as http://: " + std::string(url));
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + std::string(url));
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = std::string(url.substr(0, path_start));
  out.path = path_start == std::string_view::npos ? "" : std::string(url.substr(path_start));
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  if (out.origin.size() <= scheme_end + 3) throw ConfigError("URL has no host: " + std::string(url));
  return out;
}

}  // namespace paraeval::detail
