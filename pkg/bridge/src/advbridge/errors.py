class BridgeError(Exception):
    """Any bridge-side failure: bad config, unreadable audio, model trouble."""
