# ingestion package init
