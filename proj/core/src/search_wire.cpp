#include "twcrawl/search_wire.hpp"

#include <json.hpp>

#include "twcrawl/errors.hpp"

namespace twcrawl::wire {

using nlohmann::ordered_json;

std::string page_body(const ApiPage& page) {
  ordered_json statuses = ordered_json::array();
  for (const RawTweet& t : page.tweets) {
    statuses.push_back({{"created_at", format_api_time(t.creation_date)},
                        {"id_str", t.id},
                        {"lang", t.lang},
                        {"user",
                         {{"location", t.location}, {"name", t.name}, {"screen_name", t.username}}},
                        {"text", t.text},
                        {"retweeted_status_present", t.is_retweet}});
  }
  ordered_json body = {{"statuses", std::move(statuses)}};
  if (page.next) body["next"] = *page.next;
  return body.dump();
}

ApiPage parse_page_body(std::string_view body) {
  ApiPage page;
  try {
    const auto j = nlohmann::json::parse(body);
    for (const auto& s : j.at("statuses")) {
      RawTweet t;
      const auto created = parse_api_time(s.at("created_at").get<std::string>());
      if (!created) throw Error("bad created_at in search response");
      t.creation_date = *created;
      t.id = s.at("id_str").get<std::string>();
      t.lang = s.at("lang").get<std::string>();
      const auto& user = s.at("user");
      t.location = user.at("location").get<std::string>();
      t.name = user.at("name").get<std::string>();
      t.username = user.at("screen_name").get<std::string>();
      t.text = s.at("text").get<std::string>();
      t.is_retweet = s.value("retweeted_status_present", false);
      page.tweets.push_back(std::move(t));
    }
    if (auto it = j.find("next"); it != j.end() && it->is_string()) {
      page.next = it->get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed search response: ") + e.what());
  }
  return page;
}

std::string rate_status_body(const RateStatus& status) {
  return ordered_json{{"limit", kRequestsPerWindow},
                      {"remaining", status.remaining},
                      {"reset", to_epoch_ms(status.reset_at) / 1000}}
      .dump();
}

RateStatus parse_rate_status_body(std::string_view body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return {j.at("remaining").get<int>(), from_epoch_ms(j.at("reset").get<std::int64_t>() * 1000)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed rate_limit_status response: ") + e.what());
  }
}

}  // namespace twcrawl::wire
