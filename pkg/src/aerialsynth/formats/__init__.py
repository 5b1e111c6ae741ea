"""On-disk annotation formats: DOTA text files and COCO JSON export."""
