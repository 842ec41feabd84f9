#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ondiscuss/post.hpp"

namespace ondiscuss {

struct HttpResponse {
  int status = 0;  // 0: transport failure
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
};

/// Blocking GET. Swapped for recorded responses in tests.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url,
                           const std::map<std::string, std::string>& headers) = 0;
};

/// cpp-httplib backed transport for http:// and https:// URLs.
std::shared_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

struct CanvasConfig {
  std::string base_url;        // e.g. https://canvas.example.edu
  std::string token;           // bearer token
  std::string pseudonym_salt;  // secret mixed into author pseudonyms
  int max_retries = 5;         // rate-limit retries per request
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

struct FetchedDiscussion {
  std::vector<Post> posts;  // depth-first thread order
  std::map<std::string, std::string> identities;  // pseudonym -> Canvas user id
};

class CanvasClient {
 public:
  CanvasClient(CanvasConfig config, std::shared_ptr<HttpTransport> transport);

  /// GET /api/v1/courses/{course}/discussion_topics, following Link rel="next".
  /// Unpublished topics are skipped.
  std::vector<DiscussionSummary> fetch_discussions(const std::string& course_id);

  /// GET /api/v1/courses/{course}/discussion_topics/{id}/view and flattens the
  /// reply tree. Deleted entries are dropped and their replies re-attached to
  /// the nearest surviving ancestor.
  FetchedDiscussion fetch_posts(const std::string& course_id, const std::string& discussion_id);

 private:
  HttpResponse get_with_retry(const std::string& url, const std::string& what);

  CanvasConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

/// Removes markup and decodes entities. Line-breaking tags become newlines.
/// Sets *had_media when images, audio, video, embeds or links were present.
std::string strip_html(std::string_view html, bool* had_media = nullptr);

/// Stable opaque id: "u" + 16 hex digits of SHA-256(salt, course, user).
std::string pseudonymize(std::string_view salt, std::string_view course_id, std::string_view user_id);

/// Parses an RFC 8288 Link header and returns the rel="next" target.
std::optional<std::string> next_link(std::string_view link_header);

std::string discussion_url(std::string_view base_url, std::string_view course_id,
                           std::string_view discussion_id);
/// Throws kMissingAssignment when there is no assignment id.
std::string speedgrader_url(std::string_view base_url, std::string_view course_id,
                            const std::optional<std::string>& assignment_id,
                            std::string_view student_id);

struct CanvasLinks {
  std::string discussion_url;
  std::optional<std::string> speedgrader_url;  // absent without an assignment
};

CanvasLinks canvas_links(std::string_view base_url, std::string_view course_id,
                         std::string_view discussion_id,
                         const std::optional<std::string>& assignment_id,
                         std::string_view student_id);

}  // namespace ondiscuss
