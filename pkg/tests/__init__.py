"""Test suite for rmchannel."""
