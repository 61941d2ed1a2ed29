#include "nemo/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace nemo {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void Corpus::finalize() {
    index_by_ref.clear();
    index_by_username.clear();
    posts_by_author.clear();
    follows_out.clear();
    follows_in.clear();
    friends.clear();

    for (std::size_t i = 0; i < identities.size(); ++i) {
        const Identity& id = identities[i];
        if (id.user_id.empty()) throw CorpusError("identity with empty user_id");
        if (!index_by_ref.emplace(id.ref(), i).second) {
            throw CorpusError("duplicate user_id on " + id.network.name + ": " + id.user_id);
        }
        if (id.entity_class == EntityClass::person && id.username.empty()) {
            throw CorpusError("person without username: " + id.user_id);
        }
        if (id.entity_class != EntityClass::person && id.friendlist_public) {
            throw CorpusError("page/community cannot expose a friend list: " + id.user_id);
        }
        if (!id.username.empty()) {
            auto key = std::make_pair(id.network.name, normalize_username(id.username));
            if (!index_by_username.emplace(key, i).second) {
                throw CorpusError("duplicate username on " + id.network.name + ": " + id.username);
            }
        }
    }

    for (std::size_t p = 0; p < posts.size(); ++p) {
        Post& post = posts[p];
        if (post.timestamp < 0) throw CorpusError("negative post timestamp");
        if (!index_by_ref.count(post.author)) {
            throw CorpusError("post by unknown author: " + post.author.user_id);
        }
        post.urls = extract_urls(post.text);
        posts_by_author[post.author].push_back(p);
    }
    for (auto& [_, idxs] : posts_by_author) {
        std::sort(idxs.begin(), idxs.end(), [this](std::size_t a, std::size_t b) {
            if (posts[a].timestamp != posts[b].timestamp)
                return posts[a].timestamp > posts[b].timestamp;
            return a < b;
        });
    }

    for (const auto& e : edges) {
        const IdentityRef from{e.network, e.from};
        const IdentityRef to{e.network, e.to};
        if (!index_by_ref.count(from) || !index_by_ref.count(to)) {
            throw CorpusError("edge endpoint unknown: " + e.from + " -> " + e.to);
        }
        if (e.kind == "follows") {
            follows_out[from].push_back(e.to);
            follows_in[to].push_back(e.from);
        } else if (e.kind == "friend") {
            friends[from].push_back(e.to);
            friends[to].push_back(e.from);
        } else {
            throw CorpusError("unknown edge kind: " + e.kind);
        }
    }
    auto sort_unique = [](std::map<IdentityRef, std::vector<std::string>>& adj) {
        for (auto& [_, members] : adj) {
            std::sort(members.begin(), members.end());
            members.erase(std::unique(members.begin(), members.end()), members.end());
        }
    };
    sort_unique(follows_out);
    sort_unique(follows_in);
    sort_unique(friends);

    pages_canonical.clear();
    for (const auto& [url, page] : pages) {
        pages_canonical.emplace(canonical_url(url), &page);
    }

    for (const auto& gt : ground_truth) {
        if (!index_by_ref.count({source_network, gt.source_id}) ||
            !index_by_ref.count({target_network, gt.target_id})) {
            throw CorpusError("ground-truth pair references unknown identity");
        }
    }
}

const Identity* Corpus::find(const IdentityRef& ref) const {
    auto it = index_by_ref.find(ref);
    return it == index_by_ref.end() ? nullptr : &identities[it->second];
}

const Identity* Corpus::find(const NetworkKind& network, const std::string& user_id) const {
    return find(IdentityRef{network, user_id});
}

const Identity* Corpus::find_by_username(const NetworkKind& network,
                                         const std::string& normalized_username) const {
    auto it = index_by_username.find({network.name, normalized_username});
    return it == index_by_username.end() ? nullptr : &identities[it->second];
}

std::optional<Image> Corpus::image_of(const Identity& id) const {
    if (!id.image_key) return std::nullopt;
    auto it = images.find(*id.image_key);
    if (it == images.end()) return std::nullopt;
    return it->second;
}

const GroundTruthPair* Corpus::truth_for_source(const std::string& source_id) const {
    for (const auto& gt : ground_truth) {
        if (gt.source_id == source_id) return &gt;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// URL tracing
// ---------------------------------------------------------------------------

const Identity* profile_url_identity(const Corpus& corpus, const std::string& canonical) {
    const std::string host = corpus.target_network.name + ".net";
    if (canonical.size() <= host.size() || canonical.compare(0, host.size(), host) != 0 ||
        canonical[host.size()] != '/') {
        return nullptr;
    }
    std::string path = canonical.substr(host.size() + 1);
    auto slash = path.find('/');
    if (slash != std::string::npos) path = path.substr(0, slash);
    const std::string username = normalize_username(path);
    if (username.empty()) return nullptr;
    return corpus.find_by_username(corpus.target_network, username);
}

bool location_compatible(const std::optional<std::string>& query,
                         const std::optional<std::string>& candidate) {
    if (!query || query->empty()) return true;
    if (!candidate || candidate->empty()) return false;
    const std::string q = ascii_lower(*query);
    const std::string c = ascii_lower(*candidate);
    return c.find(q) != std::string::npos || q.find(c) != std::string::npos;
}

UrlTrace trace_url(const Corpus& corpus, const std::string& url) {
    constexpr int kMaxFetches = 5;
    UrlTrace trace;
    std::set<std::string> visited;
    std::string current = url;
    const PageRecord* page = nullptr;
    bool settled = false;

    while (trace.fetches < kMaxFetches) {
        ++trace.fetches;
        const std::string canon = canonical_url(current);
        if (!visited.insert(canon).second) {  // redirect loop
            trace.failed = true;
            settled = true;
            break;
        }
        if (const Identity* id = profile_url_identity(corpus, canon)) {
            trace.identity = id;
            settled = true;
            break;
        }
        auto pit = corpus.pages_canonical.find(canon);
        page = pit == corpus.pages_canonical.end() ? nullptr : pit->second;
        if (page && page->redirects_to) {
            current = *page->redirects_to;
            continue;
        }
        settled = true;
        break;
    }
    trace.final_url = current;

    if (!settled) {  // fetch budget exhausted mid-chain
        trace.failed = true;
        return trace;
    }
    if (trace.failed || trace.identity) return trace;

    if (!page) {  // nothing known about the landing page
        trace.failed = true;
        return trace;
    }
    trace.page_scanned = true;
    for (const auto& link : page->links) {
        if (const Identity* id = profile_url_identity(corpus, canonical_url(link))) {
            trace.identity = id;
            trace.via_page_scan = true;
            break;
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

json identity_to_json(const Identity& id) {
    json j;
    j["network"] = id.network.name;
    j["user_id"] = id.user_id;
    j["username"] = id.username;
    j["display_name"] = id.display_name;
    if (id.location) j["location"] = *id.location;
    if (id.image_key) j["image_key"] = *id.image_key;
    if (id.url_field) j["url_field"] = *id.url_field;
    j["searchable"] = id.searchable;
    j["posts_public"] = id.posts_public;
    j["friendlist_public"] = id.friendlist_public;
    j["entity_class"] = to_string(id.entity_class);
    return j;
}

Identity identity_from_json(const json& j) {
    Identity id;
    id.network = NetworkKind{j.at("network").get<std::string>()};
    id.user_id = j.at("user_id").get<std::string>();
    id.username = j.at("username").get<std::string>();
    id.display_name = j.at("display_name").get<std::string>();
    if (j.contains("location")) id.location = j["location"].get<std::string>();
    if (j.contains("image_key")) id.image_key = j["image_key"].get<std::string>();
    if (j.contains("url_field")) id.url_field = j["url_field"].get<std::string>();
    id.searchable = j.at("searchable").get<bool>();
    id.posts_public = j.at("posts_public").get<bool>();
    id.friendlist_public = j.at("friendlist_public").get<bool>();
    id.entity_class = entity_class_from_string(j.at("entity_class").get<std::string>());
    return id;
}

void write_jsonl(const fs::path& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError("cannot write " + path.string());
    for (const auto& r : records) out << r.dump() << '\n';
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot read " + path.string());
    std::vector<json> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(json::parse(line));
    }
    return records;
}

}  // namespace

void write_ppm(const fs::path& path, const Image& img) {
    if (!img.valid()) throw CorpusError("refusing to write invalid raster");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError("cannot write " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
}

Image read_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot read " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) {
        throw CorpusError("unsupported raster file: " + path.string());
    }
    in.get();  // single whitespace after header
    Image img;
    img.width = w;
    img.height = h;
    img.rgb.resize(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (!in) throw CorpusError("truncated raster file: " + path.string());
    return img;
}

std::string image_key(const Image& img) {
    std::string blob;
    blob.reserve(img.rgb.size() + 16);
    blob += std::to_string(img.width);
    blob += 'x';
    blob += std::to_string(img.height);
    blob += ':';
    blob.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(blob)));
    return std::string("img") + buf;
}

void save_corpus(const Corpus& corpus, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir / "images", ec);
    if (ec) throw CorpusError("cannot create corpus directory " + dir.string());

    std::vector<json> recs;
    recs.reserve(corpus.identities.size());
    for (const auto& id : corpus.identities) recs.push_back(identity_to_json(id));
    write_jsonl(dir / "identities.jsonl", recs);

    recs.clear();
    for (const auto& p : corpus.posts) {
        json j;
        j["author"] = p.author.user_id;
        j["network"] = p.author.network.name;
        j["text"] = p.text;
        j["timestamp"] = p.timestamp;
        if (p.source_app) j["source_app"] = *p.source_app;
        recs.push_back(std::move(j));
    }
    write_jsonl(dir / "posts.jsonl", recs);

    recs.clear();
    for (const auto& e : corpus.edges) {
        recs.push_back(json{{"network", e.network.name},
                            {"from", e.from},
                            {"to", e.to},
                            {"kind", e.kind}});
    }
    write_jsonl(dir / "edges.jsonl", recs);

    recs.clear();
    for (const auto& [url, page] : corpus.pages) {
        json j;
        j["url"] = url;
        if (page.redirects_to) j["redirects_to"] = *page.redirects_to;
        j["links"] = page.links;
        recs.push_back(std::move(j));
    }
    write_jsonl(dir / "pages.jsonl", recs);

    recs.clear();
    for (const auto& gt : corpus.ground_truth) {
        recs.push_back(json{{"source_id", gt.source_id},
                            {"target_id", gt.target_id},
                            {"leak_labels", gt.leak_labels}});
    }
    write_jsonl(dir / "groundtruth.jsonl", recs);

    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw CorpusError("cannot write manifest.json");
        out << corpus.manifest.dump(2) << '\n';
    }

    for (const auto& [key, img] : corpus.images) {
        write_ppm(dir / "images" / (key + ".ppm"), img);
    }
}

Corpus load_corpus(const fs::path& dir) {
    Corpus corpus;
    {
        std::ifstream in(dir / "manifest.json", std::ios::binary);
        if (!in) throw CorpusError("not a corpus directory (missing manifest.json): " + dir.string());
        corpus.manifest = json::parse(in);
    }
    if (corpus.manifest.contains("networks")) {
        corpus.source_network = NetworkKind{corpus.manifest["networks"]["source"].get<std::string>()};
        corpus.target_network = NetworkKind{corpus.manifest["networks"]["target"].get<std::string>()};
    }

    for (const auto& j : read_jsonl(dir / "identities.jsonl")) {
        corpus.identities.push_back(identity_from_json(j));
    }
    for (const auto& j : read_jsonl(dir / "posts.jsonl")) {
        Post p;
        p.author = IdentityRef{NetworkKind{j.at("network").get<std::string>()},
                               j.at("author").get<std::string>()};
        p.text = j.at("text").get<std::string>();
        p.timestamp = j.at("timestamp").get<std::int64_t>();
        if (j.contains("source_app")) p.source_app = j["source_app"].get<std::string>();
        corpus.posts.push_back(std::move(p));
    }
    for (const auto& j : read_jsonl(dir / "edges.jsonl")) {
        corpus.edges.push_back(CorpusEdge{NetworkKind{j.at("network").get<std::string>()},
                                          j.at("from").get<std::string>(),
                                          j.at("to").get<std::string>(),
                                          j.at("kind").get<std::string>()});
    }
    for (const auto& j : read_jsonl(dir / "pages.jsonl")) {
        PageRecord page;
        page.url = j.at("url").get<std::string>();
        if (j.contains("redirects_to")) page.redirects_to = j["redirects_to"].get<std::string>();
        for (const auto& l : j.at("links")) page.links.push_back(l.get<std::string>());
        corpus.pages.emplace(page.url, std::move(page));
    }
    for (const auto& j : read_jsonl(dir / "groundtruth.jsonl")) {
        GroundTruthPair gt;
        gt.source_id = j.at("source_id").get<std::string>();
        gt.target_id = j.at("target_id").get<std::string>();
        for (const auto& l : j.at("leak_labels")) gt.leak_labels.insert(l.get<std::string>());
        corpus.ground_truth.push_back(std::move(gt));
    }
    if (fs::exists(dir / "images")) {
        for (const auto& entry : fs::directory_iterator(dir / "images")) {
            if (entry.path().extension() != ".ppm") continue;
            corpus.images.emplace(entry.path().stem().string(), read_ppm(entry.path()));
        }
    }
    corpus.finalize();
    return corpus;
}

std::string corpus_id(const Corpus& corpus) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(corpus.manifest.dump())));
    return buf;
}

}  // namespace nemo
