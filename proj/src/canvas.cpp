#include "ondiscuss/canvas.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cstdio>
#include <thread>
#include <utility>

#include "json.hpp"
#include "ondiscuss/error.hpp"

namespace ondiscuss {
namespace {

using nlohmann::json;

std::string trim_slashes(std::string_view base) {
  while (!base.empty() && base.back() == '/') base.remove_suffix(1);
  return std::string(base);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string id_string(const json& v) {
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_string()) return v.get<std::string>();
  return {};
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one entity starting at s[i] == '&'. Returns false when it is not a
// recognized entity, in which case the '&' is kept literally.
bool decode_entity(std::string_view s, std::size_t& i, std::string& out) {
  const std::size_t semi = s.find(';', i);
  if (semi == std::string_view::npos || semi - i > 10) return false;
  const std::string_view name = s.substr(i + 1, semi - i - 1);
  static const std::pair<std::string_view, std::string_view> kNamed[] = {
      {"amp", "&"},  {"lt", "<"},        {"gt", ">"},        {"quot", "\""},
      {"apos", "'"}, {"nbsp", "\xC2\xA0"}, {"ndash", "\xE2\x80\x93"}, {"mdash", "\xE2\x80\x94"},
      {"rsquo", "\xE2\x80\x99"}, {"lsquo", "\xE2\x80\x98"}, {"rdquo", "\xE2\x80\x9D"},
      {"ldquo", "\xE2\x80\x9C"}, {"hellip", "\xE2\x80\xA6"},
  };
  for (const auto& [n, v] : kNamed) {
    if (name == n) {
      out.append(v);
      i = semi + 1;
      return true;
    }
  }
  if (name.size() >= 2 && name[0] == '#') {
    unsigned long cp = 0;
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const std::string digits(name.substr(hex ? 2 : 1));
    if (digits.empty()) return false;
    char* end = nullptr;
    cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
    if (*end != '\0') return false;
    append_utf8(out, cp);
    i = semi + 1;
    return true;
  }
  return false;
}

bool is_rate_limited(const HttpResponse& r) {
  return r.status == 429 ||
         (r.status == 403 && r.body.find("Rate Limit Exceeded") != std::string::npos);
}

}  // namespace

CanvasClient::CanvasClient(CanvasConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.base_url = trim_slashes(config_.base_url);
  if (!config_.sleep) {
    config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

HttpResponse CanvasClient::get_with_retry(const std::string& url, const std::string& what) {
  const std::map<std::string, std::string> headers = {
      {"Authorization", "Bearer " + config_.token}, {"Accept", "application/json"}};
  for (int attempt = 0;; ++attempt) {
    HttpResponse r = transport_->get(url, headers);
    if (is_rate_limited(r)) {
      if (attempt >= config_.max_retries) {
        throw Error(ErrorKind::kRateLimited, what + " still throttled after " +
                                                 std::to_string(attempt) + " retries");
      }
      long seconds = 1;
      if (auto it = r.headers.find("retry-after"); it != r.headers.end()) {
        seconds = std::max(0L, std::strtol(it->second.c_str(), nullptr, 10));
      }
      config_.sleep(std::chrono::milliseconds(seconds * 1000));
      continue;
    }
    if (r.status == 401 || r.status == 403) throw Error(ErrorKind::kAuthFailed, what);
    if (r.status == 404) throw Error(ErrorKind::kCourseNotFound, what);
    if (r.status == 0) throw Error(ErrorKind::kUpstream, what + ": no response");
    if (r.status < 200 || r.status >= 300) {
      throw Error(ErrorKind::kUpstream, what + ": HTTP " + std::to_string(r.status));
    }
    return r;
  }
}

std::vector<DiscussionSummary> CanvasClient::fetch_discussions(const std::string& course_id) {
  std::vector<DiscussionSummary> out;
  std::optional<std::string> url =
      config_.base_url + "/api/v1/courses/" + course_id + "/discussion_topics?per_page=100";
  while (url) {
    const HttpResponse r = get_with_retry(*url, "course " + course_id);
    json page;
    try {
      page = json::parse(r.body);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kMalformedPayload, std::string("discussion list: ") + e.what());
    }
    if (!page.is_array()) throw Error(ErrorKind::kMalformedPayload, "discussion list is not an array");
    for (const json& t : page) {
      if (!t.is_object() || !t.contains("id")) {
        throw Error(ErrorKind::kMalformedPayload, "discussion topic without id");
      }
      if (t.value("published", true) == false) continue;
      DiscussionSummary s;
      s.discussion_id = id_string(t["id"]);
      s.course_id = course_id;
      s.title = t.value("title", std::string{});
      if (t.contains("assignment_id") && !t["assignment_id"].is_null()) {
        s.assignment_id = id_string(t["assignment_id"]);
      }
      if (t.contains("discussion_subentry_count") && t["discussion_subentry_count"].is_number()) {
        s.post_count = t["discussion_subentry_count"].get<std::int64_t>();
      }
      out.push_back(std::move(s));
    }
    url.reset();
    if (auto it = r.headers.find("link"); it != r.headers.end()) url = next_link(it->second);
  }
  return out;
}

FetchedDiscussion CanvasClient::fetch_posts(const std::string& course_id,
                                            const std::string& discussion_id) {
  const HttpResponse r = get_with_retry(config_.base_url + "/api/v1/courses/" + course_id +
                                            "/discussion_topics/" + discussion_id + "/view",
                                        "discussion " + discussion_id);
  json body;
  try {
    body = json::parse(r.body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedPayload, std::string("discussion view: ") + e.what());
  }
  if (!body.is_object() || !body.contains("view") || !body["view"].is_array()) {
    throw Error(ErrorKind::kMalformedPayload, "discussion view has no \"view\" array");
  }

  FetchedDiscussion out;
  std::function<void(const json&, const std::optional<std::string>&)> walk =
      [&](const json& entries, const std::optional<std::string>& parent) {
        for (const json& e : entries) {
          if (!e.is_object() || !e.contains("id")) {
            throw Error(ErrorKind::kMalformedPayload, "entry without id");
          }
          std::optional<std::string> child_parent = parent;
          if (!e.value("deleted", false)) {
            const std::string user = e.contains("user_id") ? id_string(e["user_id"]) : std::string{};
            if (user.empty()) throw Error(ErrorKind::kMalformedPayload, "entry without user_id");
            const auto ts = parse_timestamp(e.value("created_at", std::string{}));
            if (!ts) throw Error(ErrorKind::kMalformedPayload, "entry with bad created_at");
            Post p;
            p.post_id = id_string(e["id"]);
            p.discussion_id = discussion_id;
            p.course_id = course_id;
            p.author_id = pseudonymize(config_.pseudonym_salt, course_id, user);
            p.parent_post_id = parent;
            p.created_at = *ts;
            const std::string message =
                e.contains("message") && e["message"].is_string() ? e["message"].get<std::string>() : "";
            p.raw_text = strip_html(message, &p.had_media);
            out.identities[p.author_id] = user;
            child_parent = p.post_id;
            out.posts.push_back(std::move(p));
          }
          if (e.contains("replies") && e["replies"].is_array()) walk(e["replies"], child_parent);
        }
      };
  walk(body["view"], std::nullopt);
  return out;
}

std::string strip_html(std::string_view html, bool* had_media) {
  static constexpr std::string_view kMediaTags[] = {"img", "video", "audio", "iframe",
                                                    "embed", "object", "source"};
  static constexpr std::string_view kBreakTags[] = {"br", "p", "div", "li", "tr",
                                                    "h1", "h2", "h3", "h4", "h5", "h6"};
  if (had_media) *had_media = false;
  std::string out;
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      const std::size_t close = html.find('>', i);
      if (close == std::string_view::npos) {
        out.append(html.substr(i));
        break;
      }
      std::string_view tag = html.substr(i + 1, close - i - 1);
      const bool closing = !tag.empty() && tag.front() == '/';
      if (closing) tag.remove_prefix(1);
      std::size_t name_end = 0;
      while (name_end < tag.size() && std::isalnum(static_cast<unsigned char>(tag[name_end]))) ++name_end;
      const std::string name = lower(tag.substr(0, name_end));
      std::size_t next = close + 1;
      if (!closing && (name == "script" || name == "style")) {
        const std::size_t end = lower(html.substr(close)).find("</" + name);
        next = end == std::string::npos ? html.size() : html.find('>', close + end);
        next = next == std::string_view::npos ? html.size() : next + 1;
      }
      if (had_media) {
        for (std::string_view m : kMediaTags) {
          if (name == m) *had_media = true;
        }
        if (name == "a" && !closing && lower(tag).find("href") != std::string::npos) *had_media = true;
      }
      for (std::string_view b : kBreakTags) {
        if (name == b && (closing || name == "br")) out.push_back('\n');
      }
      i = next;
    } else if (c == '&') {
      if (!decode_entity(html, i, out)) {
        out.push_back('&');
        ++i;
      }
    } else {
      out.push_back(c);
      ++i;
    }
  }
  const auto first = out.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = out.find_last_not_of(" \t\r\n");
  return out.substr(first, last - first + 1);
}

std::string pseudonymize(std::string_view salt, std::string_view course_id, std::string_view user_id) {
  std::string input;
  input.append(salt).push_back('\x1f');
  input.append(course_id).push_back('\x1f');
  input.append(user_id);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out = "u";
  char hex[3];
  for (int i = 0; i < 8; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", digest[i]);
    out.append(hex);
  }
  return out;
}

std::optional<std::string> next_link(std::string_view header) {
  std::size_t lt = header.find('<');
  while (lt != std::string_view::npos) {
    const std::size_t gt = header.find('>', lt);
    if (gt == std::string_view::npos) break;
    const std::size_t next_lt = header.find('<', gt);
    const std::string params = lower(header.substr(gt + 1, next_lt == std::string_view::npos
                                                               ? std::string_view::npos
                                                               : next_lt - gt - 1));
    if (params.find("rel=\"next\"") != std::string::npos || params.find("rel=next") != std::string::npos) {
      return std::string(header.substr(lt + 1, gt - lt - 1));
    }
    lt = next_lt;
  }
  return std::nullopt;
}

std::string discussion_url(std::string_view base_url, std::string_view course_id,
                           std::string_view discussion_id) {
  return trim_slashes(base_url) + "/courses/" + std::string(course_id) + "/discussion_topics/" +
         std::string(discussion_id);
}

std::string speedgrader_url(std::string_view base_url, std::string_view course_id,
                            const std::optional<std::string>& assignment_id,
                            std::string_view student_id) {
  if (!assignment_id || assignment_id->empty()) {
    throw Error(ErrorKind::kMissingAssignment, "discussion is not graded");
  }
  return trim_slashes(base_url) + "/courses/" + std::string(course_id) +
         "/gradebook/speed_grader?assignment_id=" + *assignment_id +
         "&student_id=" + std::string(student_id);
}

CanvasLinks canvas_links(std::string_view base_url, std::string_view course_id,
                         std::string_view discussion_id,
                         const std::optional<std::string>& assignment_id,
                         std::string_view student_id) {
  CanvasLinks links;
  links.discussion_url = discussion_url(base_url, course_id, discussion_id);
  if (assignment_id && !assignment_id->empty()) {
    links.speedgrader_url = speedgrader_url(base_url, course_id, assignment_id, student_id);
  }
  return links;
}

}  // namespace ondiscuss
