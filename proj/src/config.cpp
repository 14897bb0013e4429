#include "ke/config.hpp"

#include "ke/errors.hpp"

namespace ke {

openalex::Client make_client(const RunConfig& config) {
    std::shared_ptr<openalex::Transport> transport;
    openalex::ClientConfig client_config;
    client_config.mailto = config.contact_email;
    client_config.rate_limit_rps = config.rate_limit_rps;
    client_config.parallelism = config.parallelism;

    if (config.offline) {
        if (!config.fixtures.empty())
            transport = std::make_shared<openalex::FixtureTransport>(config.fixtures);
        else
            transport = std::make_shared<openalex::OfflineTransport>();
        // Pacing exists for the upstream service; reading local fixtures
        // should not crawl.
        client_config.rate_limit_rps = 10000.0;
        client_config.max_retries = 0;
    } else {
        if (config.contact_email.empty())
            throw Error(ErrorKind::usage,
                        "live requests need a contact email (--mailto or KE_MAILTO); "
                        "use --offline for fixture/cache-only runs");
        transport = std::make_shared<openalex::HttpTransport>(config.api_base);
    }

    auto cache = std::make_shared<openalex::WorkCache>(
        config.cache_dir.empty() ? std::filesystem::path{}
                                 : config.cache_dir / "works.jsonl");
    return openalex::Client(std::move(transport), std::move(cache), std::move(client_config));
}

}  // namespace ke
