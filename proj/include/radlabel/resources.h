#ifndef RADLABEL_RESOURCES_H_
#define RADLABEL_RESOURCES_H_

#include <string_view>

namespace radlabel::resources {

// Generated at build time from data/schema.json and data/lexicon.json.
std::string_view default_schema_json();
std::string_view default_lexicon_json();

}  // namespace radlabel::resources

#endif  // RADLABEL_RESOURCES_H_
