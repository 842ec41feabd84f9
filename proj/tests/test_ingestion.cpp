#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "fake_canvas.hpp"
#include "fixtures.hpp"
#include "ondiscuss/canvas.hpp"
#include "ondiscuss/csv.hpp"
#include "ondiscuss/error.hpp"
#include "ondiscuss/pipeline.hpp"

using namespace ondiscuss;
using fixtures::FakeCanvas;
using fixtures::make_post;

namespace {

CanvasClient client_for(std::shared_ptr<FakeCanvas> fake, std::vector<std::chrono::milliseconds>* sleeps = nullptr,
                        int max_retries = 5) {
  CanvasConfig config;
  config.base_url = std::string(FakeCanvas::kBase) + "/";
  config.token = "tok";
  config.pseudonym_salt = "s3cret";
  config.max_retries = max_retries;
  config.sleep = [sleeps](std::chrono::milliseconds d) {
    if (sleeps) sleeps->push_back(d);
  };
  return CanvasClient(config, std::move(fake));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("discussion listing") {
  auto fake = FakeCanvas::standard();
  auto client = client_for(fake);

  const auto course101 = client.fetch_discussions("101");
  REQUIRE(course101.size() == 3);
  CHECK(course101[0].discussion_id == "501");
  CHECK(course101[0].title == "Week 3: Testing strategies");
  CHECK(course101[0].assignment_id == std::optional<std::string>("9001"));
  CHECK(course101[0].post_count == 6);
  CHECK(course101[2].discussion_id == "504");
  CHECK_FALSE(course101[2].assignment_id.has_value());
  CHECK(fake->auth_headers().front() == "Bearer tok");

  const auto course202 = client.fetch_discussions("202");
  REQUIRE(course202.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(course202[i].discussion_id == std::to_string(7001 + i));
}

TEST_CASE("listing failures") {
  auto fake = std::make_shared<FakeCanvas>();
  fake->add_file("/api/v1/courses/101/discussion_topics?per_page=100", "error_401.json", 401);
  CHECK(kind_of([&] { client_for(fake).fetch_discussions("101"); }) == ErrorKind::kAuthFailed);
  CHECK(kind_of([&] { client_for(fake).fetch_discussions("999"); }) == ErrorKind::kCourseNotFound);
  fake->add("/api/v1/courses/303/discussion_topics?per_page=100", {200, {}, "{\"not\": \"a list\"}"});
  CHECK(kind_of([&] { client_for(fake).fetch_discussions("303"); }) == ErrorKind::kMalformedPayload);
  fake->add("/api/v1/courses/304/discussion_topics?per_page=100", {500, {}, ""});
  CHECK(kind_of([&] { client_for(fake).fetch_discussions("304"); }) == ErrorKind::kUpstream);
  fake->set_down(true);
  CHECK(kind_of([&] { client_for(fake).fetch_discussions("101"); }) == ErrorKind::kUpstream);
}

TEST_CASE("rate limits are retried after the advertised delay") {
  auto fake = std::make_shared<FakeCanvas>();
  const std::string path = "/api/v1/courses/101/discussion_topics?per_page=100";
  fake->add(path, {429, {{"retry-after", "3"}}, ""});
  fake->add(path, {403, {}, "403 Forbidden (Rate Limit Exceeded)"});
  fake->add_file(path, "course101_topics.json");
  std::vector<std::chrono::milliseconds> sleeps;
  CHECK(client_for(fake, &sleeps).fetch_discussions("101").size() == 3);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[0] == std::chrono::seconds(3));
  CHECK(sleeps[1] == std::chrono::seconds(1));

  auto stuck = std::make_shared<FakeCanvas>();
  stuck->add(path, {429, {{"retry-after", "0"}}, ""});
  sleeps.clear();
  CHECK(kind_of([&] { client_for(stuck, &sleeps, 2).fetch_discussions("101"); }) == ErrorKind::kRateLimited);
  CHECK(sleeps.size() == 2);
}

TEST_CASE("threaded view is flattened depth first") {
  auto fake = FakeCanvas::standard();
  auto client = client_for(fake);
  const FetchedDiscussion d = client.fetch_posts("101", "501");
  REQUIRE(d.posts.size() == 6);
  const std::vector<std::string> ids = {"9101", "9102", "9103", "9105", "9106", "9108"};
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(d.posts[i].post_id == ids[i]);

  CHECK(d.posts[0].is_initial());
  CHECK(d.posts[1].parent_post_id == std::optional<std::string>("9101"));
  CHECK(d.posts[2].parent_post_id == std::optional<std::string>("9102"));
  // Replies to deleted entries move to the nearest surviving ancestor.
  CHECK(d.posts[3].is_initial());
  CHECK(d.posts[5].parent_post_id == std::optional<std::string>("9106"));

  std::set<std::string> present;
  for (const Post& p : d.posts) present.insert(p.post_id);
  for (const Post& p : d.posts) {
    if (p.parent_post_id) CHECK(present.count(*p.parent_post_id) == 1);
    CHECK(p.discussion_id == "501");
    CHECK(p.course_id == "101");
    CHECK(p.raw_text.find('<') == std::string::npos);
  }

  CHECK(d.posts[0].raw_text ==
        "We used category partition testing on the REST\xC2\xA0" "API.\nBlack-box tests & boundary values found the bug.");
  CHECK_FALSE(d.posts[0].had_media);
  CHECK(d.posts[1].raw_text == "Agreed \xE2\x80\x94 a getter made the state observable.");
  CHECK(format_timestamp(d.posts[1].created_at) == "2023-09-13T17:40:00Z");
  CHECK(format_timestamp(d.posts[2].created_at) == "2023-09-14T08:00:00Z");
  CHECK(d.posts[2].raw_text == "See my notes\non subclass design.");
  CHECK(d.posts[2].had_media);
  CHECK(d.posts[4].had_media);
  CHECK(d.posts[4].raw_text == "My diagram: \nWhite box testing of each mutator.");

  // Pseudonyms: SHA-256 of salt, course and user joined by 0x1F, first 8 bytes.
  CHECK(d.posts[0].author_id == "u2fb9b5d3e47a4efd");
  CHECK(d.posts[2].author_id == d.posts[0].author_id);
  CHECK(d.posts[1].author_id != d.posts[0].author_id);
  CHECK(d.identities.at("u2fb9b5d3e47a4efd") == "11");
  CHECK(d.identities.size() == 3);

  const FetchedDiscussion again = client.fetch_posts("101", "501");
  CHECK(again.posts == d.posts);
}

TEST_CASE("malformed views") {
  auto fake = std::make_shared<FakeCanvas>();
  fake->add("/api/v1/courses/1/discussion_topics/2/view", {200, {}, "not json"});
  fake->add("/api/v1/courses/1/discussion_topics/3/view", {200, {}, "{\"view\": [{\"user_id\": 1}]}"});
  fake->add("/api/v1/courses/1/discussion_topics/4/view",
            {200, {}, "{\"view\": [{\"id\": 1, \"user_id\": 1, \"created_at\": \"yesterday\"}]}"});
  CHECK(kind_of([&] { client_for(fake).fetch_posts("1", "2"); }) == ErrorKind::kMalformedPayload);
  CHECK(kind_of([&] { client_for(fake).fetch_posts("1", "3"); }) == ErrorKind::kMalformedPayload);
  CHECK(kind_of([&] { client_for(fake).fetch_posts("1", "4"); }) == ErrorKind::kMalformedPayload);
}

TEST_CASE("ingest_canvas combines listing and view") {
  auto fake = FakeCanvas::standard();
  auto client = client_for(fake);
  const DiscussionRecord r = ingest_canvas(client, "101", "501");
  CHECK(r.summary.title == "Week 3: Testing strategies");
  CHECK(r.summary.post_count == 6);
  CHECK(r.posts.size() == 6);
  CHECK(kind_of([&] { ingest_canvas(client, "101", "502"); }) == ErrorKind::kNotFound);
}

TEST_CASE("html stripping") {
  CHECK(strip_html("<p>REST API</p>") == "REST API");
  CHECK(strip_html("a &lt;b&gt; &amp;&#65;&#x42; &unknown; & c") == "a <b> &AB &unknown; & c");
  CHECK(strip_html("x<script>alert('<p>')</script>y") == "xy");
  CHECK(strip_html("line<br/>break") == "line\nbreak");
  bool media = false;
  CHECK(strip_html("<video src=x></video>text", &media) == "text");
  CHECK(media);
  strip_html("<a name=anchor>plain</a>", &media);
  CHECK_FALSE(media);
  CHECK(strip_html("") == "");
  CHECK(strip_html("unclosed <tag") == "unclosed <tag");
}

TEST_CASE("link header parsing") {
  CHECK(next_link("<https://x/a?page=2>; rel=\"next\"") == std::optional<std::string>("https://x/a?page=2"));
  CHECK(next_link("<https://x/a?page=1>; rel=\"current\", <https://x/a?page=3>; rel=\"next\"") ==
        std::optional<std::string>("https://x/a?page=3"));
  CHECK_FALSE(next_link("<https://x/a?page=1>; rel=\"first\"").has_value());
  CHECK_FALSE(next_link("").has_value());
}

TEST_CASE("canvas links") {
  const auto links = canvas_links("https://c.edu/", "1", "2", std::string("3"), "4");
  CHECK(links.discussion_url == "https://c.edu/courses/1/discussion_topics/2");
  CHECK(links.speedgrader_url ==
        std::optional<std::string>("https://c.edu/courses/1/gradebook/speed_grader?assignment_id=3&student_id=4"));
  const auto ungraded = canvas_links("https://c.edu", "1", "2", std::nullopt, "4");
  CHECK(ungraded.discussion_url == "https://c.edu/courses/1/discussion_topics/2");
  CHECK_FALSE(ungraded.speedgrader_url.has_value());
  CHECK(kind_of([] { speedgrader_url("https://c.edu", "1", std::nullopt, "4"); }) ==
        ErrorKind::kMissingAssignment);
  CHECK(discussion_url("https://c.edu///", "1", "2").find("edu/courses") != std::string::npos);
}

TEST_CASE("pseudonyms") {
  CHECK(pseudonymize("salt", "101", "42") == "u776cf36719794765");
  CHECK(pseudonymize("", "101", "11") == "udabc3107c74f5883");
  CHECK(pseudonymize("salt", "102", "42") != pseudonymize("salt", "101", "42"));
}

TEST_CASE("timestamps") {
  CHECK(format_timestamp(*parse_timestamp("2023-09-13T12:40:00-05:00")) == "2023-09-13T17:40:00Z");
  CHECK(format_timestamp(*parse_timestamp("2023-09-13T12:40:00.123+02:30")) == "2023-09-13T10:10:00Z");
  CHECK(format_timestamp(*parse_timestamp("2024-02-29T00:00:00")) == "2024-02-29T00:00:00Z");
  CHECK_FALSE(parse_timestamp("2023-13-01T00:00:00Z").has_value());
  CHECK_FALSE(parse_timestamp("2023-09-13 12:40").has_value());
  CHECK_FALSE(parse_timestamp("").has_value());
}

TEST_CASE("csv export layout") {
  Codebook cb = fixtures::testing_course_codebook();
  cb = apply_edit(cb, CodebookEdit::rename(4, "object, \"oriented\""));
  const std::vector<Post> posts = {make_post("p2", "s2", "plain", std::nullopt, 3),
                                   make_post("p1", "s1", "Said \"hi\", then left\nfor lunch", std::string("p2"), 1)};
  const auto coded = code_corpus(preprocess_corpus(posts), posts, cb);
  const std::string csv = export_csv(posts, coded, cb);
  const std::string expected =
      "StudentID,PostID,IsInitial,Timestamp,Text,Observability,Controllability,inheritance,testing,"
      "\"object, \"\"oriented\"\"\"\r\n"
      "s1,p1,0,2023-11-14T22:14:20Z,\"Said \"\"hi\"\", then left\nfor lunch\",0,0,0,0,0\r\n"
      "s2,p2,1,2023-11-14T22:16:20Z,plain,0,0,0,0,0\r\n";
  CHECK(csv == expected);
  CHECK(std::count(csv.begin(), csv.end(), '\r') == 3);
}

TEST_CASE("csv round trip") {
  const Codebook cb = fixtures::learning_course_codebook();
  std::vector<Post> posts = fixtures::synthetic_discussion(300, 40, cb, 21, 40);
  posts[0].raw_text = "commas, \"quotes\", and\r\nline breaks\nmixed";
  posts[1].raw_text = "";
  posts[2].raw_text = "\"";
  posts[3].raw_text = ",,,";
  posts[4].raw_text = "trailing newline\n";
  const auto coded = code_corpus(preprocess_corpus(posts), posts, cb);
  const ImportedCsv back = import_csv(export_csv(posts, coded, cb), "scale", "c1");
  REQUIRE(back.posts.size() == posts.size());
  REQUIRE(back.codes.size() == posts.size());
  CHECK(back.topic_names == std::vector<std::string>{"effortful learning", "beyond learning styles",
                                                     "illusion of mastery",
                                                     "retrieval practice spaced out practice interleaving", "4"});
  std::map<std::string, std::pair<const Post*, const CodedUtterance*>> original;
  for (std::size_t i = 0; i < posts.size(); ++i) original[posts[i].post_id] = {&posts[i], &coded[i]};
  for (std::size_t i = 0; i < back.posts.size(); ++i) {
    const auto& [post, code] = original.at(back.posts[i].post_id);
    CHECK(back.posts[i].author_id == post->author_id);
    CHECK(back.posts[i].raw_text == post->raw_text);
    CHECK(back.posts[i].created_at == post->created_at);
    CHECK(back.posts[i].is_initial() == post->is_initial());
    CHECK(back.codes[i] == code->codes);
  }
}

TEST_CASE("csv import errors and tolerance") {
  CHECK(kind_of([] { import_csv(""); }) == ErrorKind::kBadHeader);
  CHECK(kind_of([] { import_csv("StudentID,PostID,IsInitial,Text\r\n"); }) == ErrorKind::kBadHeader);
  try {
    import_csv("StudentID,PostID,IsInitial,Timestamp,Text\r\ns1,p1,1,2023-01-01T00:00:00Z,ok\r\ns1,p2,maybe,"
               "2023-01-01T00:00:00Z,bad\r\n");
    FAIL("expected BadRow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBadRow);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(kind_of([] { import_csv("StudentID,PostID,IsInitial,Timestamp,Text\ns1,p1,1,2023-01-01T00:00:00Z,\"open"); }) ==
        ErrorKind::kBadRow);
  CHECK(kind_of([] { import_csv("StudentID,PostID,IsInitial,Timestamp,Text\ns1,p1,1,2023-01-01T00:00:00Z,\"a\"b\n"); }) ==
        ErrorKind::kBadRow);
  CHECK(kind_of([] { import_csv("StudentID,PostID,IsInitial,Timestamp,Text\ns1,p1,1\n"); }) == ErrorKind::kBadRow);

  const std::string text_only =
      "\xEF\xBB\xBFText,Timestamp,StudentID,Notes,PostID,IsInitial\n"
      "hello,2023-01-01T00:00:00Z,s1,x,p1,1\n"
      "\"multi\nline\",2023-01-01T00:01:00Z,s2,y,p2,0\n"
      "three,2023-01-01T00:02:00Z,s1,z,p3,0\n"
      "four,2023-01-01T00:03:00Z,s3,,p4,1\n"
      "five,2023-01-01T00:04:00Z,s3,,p5,0\n";
  const ImportedCsv imported = import_csv(text_only, "d9");
  REQUIRE(imported.posts.size() == 5);
  CHECK(imported.codes.empty());
  CHECK(imported.topic_names.empty());
  CHECK(imported.posts[1].raw_text == "multi\nline");
  CHECK(imported.posts[1].parent_post_id == std::optional<std::string>(""));
  CHECK(imported.posts[0].is_initial());
  CHECK(imported.posts[0].discussion_id == "d9");

  const DiscussionRecord rec = ingest_csv(text_only, "d9", "c9", "Imported");
  CHECK(rec.summary.post_count == 5);
  CHECK(rec.summary.title == "Imported");
}
