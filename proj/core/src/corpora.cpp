#include "corpora.hpp"

#include <array>

namespace twcrawl::corpora {
namespace {

constexpr std::array<std::string_view, 48> kFirstNames = {
    "Aarav", "Priya",  "Mohammed", "Fatima", "Rahul",  "Ananya", "Omar",   "Layla",
    "James", "Olivia", "Lucas",    "Sofia",  "Kenji",  "Yuki",   "Chen",   "Mei",
    "Ahmed", "Zainab", "Carlos",   "Lucia",  "Ivan",   "Olga",   "Kwame",  "Amara",
    "Noah",  "Emma",   "Arjun",    "Sana",   "Tariq",  "Hina",   "Diego",  "Valentina",
    "Liam",  "Chloe",  "Hamza",    "Ayesha", "Mateo",  "Isabel", "Ravi",   "Deepa",
    "Felix", "Hannah", "Samir",    "Nadia",  "Pedro",  "Ines",   "Tomasz", "Agnieszka"};

constexpr std::array<std::string_view, 40> kLastNames = {
    "Sharma", "Khan",     "Patel",   "Siddiqui", "Smith",    "Johnson", "Garcia",  "Silva",
    "Tanaka", "Wang",     "Hassan",  "Ali",      "Rossi",    "Mueller",  "Petrov",  "Mensah",
    "Brown",  "Martin",   "Gupta",   "Rahman",   "Hussain",  "Lopez",   "Santos",  "Kowalski",
    "Nguyen", "Kim",      "Okafor",  "Ibrahim",  "Fischer",  "Dubois",  "Moreau",  "Yilmaz",
    "Alam",   "Hasan",    "Arsalan", "Mehta",    "Fernandes", "Costa",  "Novak",   "Larsen"};

// Mostly resolvable by the bundled gazetteer; a few deliberately are not.
constexpr std::array<std::string_view, 64> kLocations = {
    "New Delhi, India",       "Mumbai",
    "Delhi, India",           "Bangalore, India",
    "Hyderabad",              "Karachi, Pakistan",
    "Lahore",                 "Dhaka, Bangladesh",
    "London, UK",             "Manchester, England",
    "Paris, France",          "Lyon",
    "Berlin",                 "Munich, Germany",
    "Madrid, Spain",          "Barcelona",
    "Rome, Italy",            "Milan",
    "New York, USA",          "Los Angeles, CA",
    "Chicago",                "San Francisco",
    "Toronto, Canada",        "Vancouver",
    "Mexico City",            "São Paulo, Brazil",
    "Rio de Janeiro",         "Buenos Aires, Argentina",
    "Lagos, Nigeria",         "Nairobi, Kenya",
    "Cairo, Egypt",           "Johannesburg",
    "Riyadh, Saudi Arabia",   "Jeddah",
    "Dubai, UAE",             "Istanbul, Turkey",
    "Tehran",                 "Moscow, Russia",
    "Tokyo, Japan",           "Osaka",
    "Seoul, South Korea",     "Beijing, China",
    "Shanghai",               "Hong Kong",
    "Singapore",              "Jakarta, Indonesia",
    "Manila, Philippines",    "Bangkok, Thailand",
    "Sydney, Australia",      "Melbourne",
    "Auckland, New Zealand",  "Dublin, Ireland",
    "Amsterdam, Netherlands", "Stockholm, Sweden",
    "Warsaw, Poland",         "Lisbon, Portugal",
    "Aligarh",                "Jeddah, Saudi Arabia",
    "somewhere over the rainbow", "Earth",
    "the internet",           "Worldwide",
    "in my own world",        "127.0.0.1"};

constexpr std::array<std::string_view, 12> kLanguages = {"en", "en", "en", "en", "hi", "es",
                                                         "ar", "fr", "pt", "ja", "ur", "de"};

constexpr std::array<std::string_view, 96> kWords = {
    "the",     "a",        "is",      "today",   "love",     "this",    "so",       "great",
    "new",     "just",     "got",     "my",      "we",       "they",    "news",     "update",
    "really",  "happy",    "sad",     "time",    "day",      "night",   "morning",  "world",
    "people",  "think",    "what",    "why",     "how",      "never",   "always",   "best",
    "worst",   "city",     "weather", "game",    "match",    "win",     "vote",     "election",
    "policy",  "music",    "movie",   "book",    "reading",  "friends", "family",   "follow",
    "buy",     "price",    "deal",    "shop",    "sale",     "discount", "order",   "delivery",
    "food",    "recipe",   "restaurant", "dinner", "lunch",  "biryani", "pizza",    "coffee",
    "trip",    "flight",   "hotel",   "travel",  "beach",    "visa",    "airport",  "vacation",
    "school",  "exam",     "work",    "office",  "meeting",  "rain",    "traffic",  "phone",
    "data",    "privacy",  "api",     "research", "science", "health",  "doctor",   "gym",
    "and",     "but",      "with",    "for",     "at",       "on",      "in",       "of"};

constexpr std::array<std::string_view, 16> kHashtags = {
    "#news",    "#travel", "#food",   "#deals",  "#cricket", "#music", "#privacy", "#data",
    "#monday",  "#love",   "#tech",   "#india",  "#health",  "#shop",  "#vote",    "#weekend"};

}  // namespace

std::span<const std::string_view> first_names() { return kFirstNames; }
std::span<const std::string_view> last_names() { return kLastNames; }
std::span<const std::string_view> locations() { return kLocations; }
std::span<const std::string_view> languages() { return kLanguages; }
std::span<const std::string_view> words() { return kWords; }
std::span<const std::string_view> hashtags() { return kHashtags; }

}  // namespace twcrawl::corpora
